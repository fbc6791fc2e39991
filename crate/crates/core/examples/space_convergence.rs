//! Mesh refinement at a fixed time step. The default is a cut-down
//! protocol that finishes in seconds; `--full` runs N = 20..640 against
//! N = 1280 at dt = 1e-4.
//!
//! ```text
//! cargo run --release --example space_convergence [-- --full]
//! ```

use front_fem::analysis::{space_study, SpaceStudy};
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::rubber_experiment();
    let d = nondimensionalize(&p, &Coefficient::Constant(p.m0))?;

    let study = if std::env::args().any(|a| a == "--full") {
        SpaceStudy::default()
    } else {
        SpaceStudy {
            dt: 1e-4,
            nodes: vec![10, 20, 40, 80],
            reference_nodes: 320,
        }
    };
    let table = space_study(&d, &study)?;
    print!("{table}");
    Ok(())
}
