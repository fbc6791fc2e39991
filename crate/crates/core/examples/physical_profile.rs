//! Concentration profile m(x) in physical units at the final time, next
//! to the interface track s(t).

use front_fem::mesh::Mesh1D;
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};
use front_fem::stepper::{run, to_physical};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::rubber_experiment();
    let d = nondimensionalize(&p, &Coefficient::Constant(p.m0))?;
    let traj = run(&d, &Mesh1D::uniform(21)?, 1e-5, 366_000)?;
    let snaps = to_physical(&traj, &p);

    println!("interface track:");
    for s in &snaps {
        println!("  t = {:>5.1} min  s = {:.5} mm", s.t, s.s);
    }
    let last = snaps.last().unwrap();
    println!("profile at t = {} min:", last.t);
    for (x, m) in last.x_nodes.iter().zip(&last.m_values) {
        println!("  x = {x:.5} mm  m = {m:.5}");
    }
    Ok(())
}
