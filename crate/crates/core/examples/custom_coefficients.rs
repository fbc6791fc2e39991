//! Coefficients beyond constants and lines: a boundary concentration
//! read from a table, and a closure for the interface resistance with a
//! saturation plateau.

use front_fem::mesh::Mesh1D;
use front_fem::model::{nondimensionalize, validate_assumptions, Coefficient, PhysicalParameters};
use front_fem::stepper::run;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut p = PhysicalParameters::rubber_experiment();
    // Surface concentration ramps up over the first two minutes.
    p.b = Coefficient::tabulated(vec![(0.0, 0.2), (2.0, 1.0), (10.0, 1.0)])?;
    p.sigma = Coefficient::custom(|s| 0.1 * s / (1.0 + s));
    p.sigma_plateau = Some(0.05);

    let d = nondimensionalize(&p, &Coefficient::Constant(0.001))?;
    print!("{}", validate_assumptions(&d));

    let traj = run(&d, &Mesh1D::uniform(80)?, 1e-5, usize::MAX)?;
    let g = &traj.diagnostics;
    println!(
        "s(Tf) = {:.5} mm, m in [{:.5}, {:.5}], interface monotone: {}",
        p.s0 * g.w_final,
        p.m0 * g.u_min,
        p.m0 * g.u_max,
        g.w_monotone()
    );
    Ok(())
}
