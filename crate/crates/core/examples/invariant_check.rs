//! The invariant suite over the first physical minute of the experiment.

use front_fem::cli::run_invariant_suite;
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = PhysicalParameters::rubber_experiment();
    p.t_final = 1.0;
    let d = nondimensionalize(&p, &Coefficient::Constant(p.m0))?;
    let report = run_invariant_suite(&d, 80, 1e-5);
    print!("{report}");
    if !report.all_passed() {
        std::process::exit(4);
    }
    Ok(())
}
