//! Time step refinement on a fixed mesh, for a sample that starts with
//! the interface equilibrium concentration instead of a saturated one.
//! The saturated start needs much smaller steps before the explicit
//! interface terms settle down (see `stability_sweep`).
//!
//! ```text
//! cargo run --release --example time_convergence
//! ```

use front_fem::analysis::{time_study, TimeStudy};
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::rubber_experiment();
    let m_eq = p.sigma.eval(p.s0);
    let d = nondimensionalize(&p, &Coefficient::Constant(m_eq))?;

    let table = time_study(&d, &TimeStudy::halving(80, 1e-3, 4, 16))?;
    print!("{table}");
    Ok(())
}
