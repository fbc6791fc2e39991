//! Drives the rubber penetration experiment step by step and prints the
//! interface position once per physical minute.
//!
//! ```text
//! cargo run --release --example simulate_experiment
//! ```

use std::sync::Arc;

use front_fem::mesh::Mesh1D;
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};
use front_fem::stepper::{snapshot, Stepper};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = PhysicalParameters::rubber_experiment();
    let d = Arc::new(nondimensionalize(&p, &Coefficient::Constant(p.m0))?);
    println!("Bi = {:.5}, A0 = {:.5}, T = {}", d.biot, d.a0, d.t_final);

    let dt = 1e-5;
    let mut stepper = Stepper::new(Arc::clone(&d), Arc::new(Mesh1D::uniform(80)?), dt)?;
    let steps = stepper.step_count()?;
    let per_minute = steps / p.t_final as usize;

    let mut state = stepper.initial_state()?;
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "t[min]", "s[mm]", "m(0)", "m(s)"
    );
    for n in 1..=steps {
        state = stepper.advance(&state)?.0;
        if n % per_minute == 0 {
            let phys = snapshot(&state, &p);
            let m = &phys.m_values;
            println!(
                "{:>6.1} {:>12.6} {:>12.6} {:>12.6}",
                phys.t,
                phys.s,
                m[0],
                m[m.len() - 1]
            );
        }
    }
    Ok(())
}
