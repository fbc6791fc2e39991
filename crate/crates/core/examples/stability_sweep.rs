//! Where does the scheme stop behaving? The boundary and interface terms
//! are explicit, so the step must resolve the early, fast interface
//! motion. Each step size is reported as clean, non-monotone (W dips or
//! U leaves its bounds) or broken down.

use front_fem::mesh::Mesh1D;
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};
use front_fem::stepper::run;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::rubber_experiment();
    let d = nondimensionalize(&p, &Coefficient::Constant(p.m0))?;
    let mesh = Mesh1D::uniform(40)?;

    for dt in [
        8e-2, 4e-2, 2e-2, 1e-2, 1e-3, 5e-4, 2e-4, 1e-4, 5e-5, 2e-5, 1e-5,
    ] {
        match run(&d, &mesh, dt, usize::MAX) {
            Ok(t) => {
                let g = &t.diagnostics;
                let verdict = if g.w_monotone() && g.u_min >= 0.0 {
                    "clean"
                } else {
                    "non-monotone"
                };
                println!(
                    "dt = {dt:<8e} {verdict:<13} W(T) = {:.4}, U in [{:.3}, {:.3}]",
                    g.w_final, g.u_min, g.u_max
                );
            }
            Err(f) => println!("dt = {dt:<8e} breakdown     {}", f.error),
        }
    }
    Ok(())
}
