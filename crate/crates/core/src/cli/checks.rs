//! The invariant suite behind `check-invariants`.

use std::fmt;
use std::sync::Arc;

use crate::mesh::Mesh1D;
use crate::model::{validate_assumptions, DimensionlessParameters};
use crate::stepper::{run_shared, RunFailure, StepError, Trajectory};

/// Largest drift allowed for a constant state under zero coupling.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;
/// Relative spread allowed for the energy across meshes.
pub const ENERGY_BAND: f64 = 0.05;
/// Headroom over `b*/H` for the nodal upper bound.
pub const BOUND_FACTOR: f64 = 1.05;
pub const ENERGY_MESHES: [usize; 4] = [40, 80, 160, 320];

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
}

#[derive(Debug, Clone, Default)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
    /// Set when some run stopped on a stability guard.
    pub breakdown: Option<StepError>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, passed: bool, measured: String) {
        self.checks.push(InvariantCheck {
            name,
            passed,
            measured,
        });
    }

    fn note_failure(&mut self, name: &'static str, f: &RunFailure) {
        if matches!(f.error, StepError::StabilityBreakdown { .. }) && self.breakdown.is_none() {
            self.breakdown = Some(f.error.clone());
        }
        self.push(name, false, f.error.to_string());
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag}  {:<20} {}", c.name, c.measured)?;
        }
        if let Some(e) = &self.breakdown {
            writeln!(f, "breakdown: {e}")?;
        }
        Ok(())
    }
}

/// Largest nodal drift of a constant state over `steps` steps with both
/// boundary couplings switched off.
pub fn fixed_point_drift(
    value: f64,
    n_nodes: usize,
    dt: f64,
    steps: usize,
) -> Result<f64, RunFailure> {
    let d = DimensionlessParameters::zero_coupling(value, dt * steps as f64);
    let mesh = Mesh1D::uniform(n_nodes).map_err(StepError::from)?;
    let traj = run_shared(Arc::new(d), Arc::new(mesh), dt, 1)?;
    Ok(traj
        .states
        .iter()
        .flat_map(|s| {
            s.u.coeffs()
                .iter()
                .map(|v| (v - value).abs())
                .chain([(s.w - 1.0).abs()])
        })
        .fold(0.0, f64::max))
}

/// Whether two runs agree bit for bit, states and diagnostics alike.
pub fn bitwise_equal(a: &Trajectory, b: &Trajectory) -> bool {
    a.states.len() == b.states.len()
        && a.states.iter().zip(&b.states).all(|(x, y)| {
            x.step_index == y.step_index
                && x.w.to_bits() == y.w.to_bits()
                && x.tau.to_bits() == y.tau.to_bits()
                && x.u
                    .coeffs()
                    .iter()
                    .zip(y.u.coeffs())
                    .all(|(p, q)| p.to_bits() == q.to_bits())
        })
        && a.diagnostics.energy().to_bits() == b.diagnostics.energy().to_bits()
}

/// Relative spread `(max - min) / max` of a set of positive values.
pub fn relative_spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / hi
}

/// Upper bound for nodal values, `b*/H` with headroom, from the sampled
/// supremum of the scaled boundary concentration.
pub fn nodal_upper_bound(d: &DimensionlessParameters) -> f64 {
    let b_star = (0..=1000)
        .map(|i| d.eval_b(d.t_final * i as f64 / 1000.0).unwrap_or(f64::NAN))
        .fold(f64::NEG_INFINITY, f64::max);
    BOUND_FACTOR * b_star / d.henry
}

/// Runs every check on `(n_nodes, dt)`. Record keeping is sparse, so long
/// runs stay cheap in memory; bitwise comparison covers the recorded
/// states and the energy accumulated over every step.
pub fn run_invariant_suite(
    d: &DimensionlessParameters,
    n_nodes: usize,
    dt: f64,
) -> InvariantReport {
    let mut report = InvariantReport::default();

    let assumptions = validate_assumptions(d);
    let measured = if assumptions.violations.is_empty() {
        format!("{} warning(s)", assumptions.warnings.len())
    } else {
        assumptions
            .violations
            .iter()
            .map(|(a, m)| format!("{a}: {m}"))
            .collect::<Vec<_>>()
            .join("; ")
    };
    report.push("assumptions", assumptions.passed, measured);

    match fixed_point_drift(0.37, n_nodes, dt, 20) {
        Ok(drift) => report.push(
            "fixed-point",
            drift <= FIXED_POINT_TOLERANCE,
            format!("max drift {drift:e} (tolerance {FIXED_POINT_TOLERANCE:e})"),
        ),
        Err(f) => report.note_failure("fixed-point", &f),
    }

    let params = Arc::new(d.clone());
    let record_every = 1000;
    let mesh = match Mesh1D::uniform(n_nodes) {
        Ok(m) => Arc::new(m),
        Err(e) => {
            report.push("run", false, e.to_string());
            return report;
        }
    };
    let main = match run_shared(Arc::clone(&params), Arc::clone(&mesh), dt, record_every) {
        Ok(t) => t,
        Err(f) => {
            report.note_failure("run", &f);
            return report;
        }
    };
    let diag = &main.diagnostics;
    report.push(
        "run",
        true,
        format!(
            "{} steps, W(T) = {}, max residual {:e}",
            diag.steps, diag.w_final, diag.max_relative_residual
        ),
    );

    match run_shared(Arc::clone(&params), Arc::clone(&mesh), dt, record_every) {
        Ok(again) => {
            let same = bitwise_equal(&main, &again);
            report.push("determinism", same, format!("bitwise identical: {same}"));
        }
        Err(f) => report.note_failure("determinism", &f),
    }

    let driving = diag.interface_driving_nonnegative;
    let monotone = diag.w_monotone();
    report.push(
        "monotonicity",
        !driving || monotone,
        format!(
            "driving nonnegative: {driving}, W monotone: {monotone}{}",
            diag.first_w_decrease
                .map(|n| format!(" (first decrease at step {n})"))
                .unwrap_or_default()
        ),
    );

    let upper = nodal_upper_bound(d);
    report.push(
        "bounds",
        diag.u_min >= 0.0 && diag.u_max <= upper,
        format!(
            "U in [{}, {}], allowed [0, {}]",
            diag.u_min, diag.u_max, upper
        ),
    );

    let mut energies = Vec::new();
    for n in ENERGY_MESHES {
        if n == n_nodes {
            energies.push(diag.energy());
            continue;
        }
        let result = Mesh1D::uniform(n)
            .map_err(|e| RunFailure::from(StepError::from(e)))
            .and_then(|m| run_shared(Arc::clone(&params), Arc::new(m), dt, usize::MAX));
        match result {
            Ok(t) => energies.push(t.diagnostics.energy()),
            Err(f) => {
                report.note_failure("energy-band", &f);
                return report;
            }
        }
    }
    let spread = relative_spread(&energies);
    let listed = ENERGY_MESHES
        .iter()
        .zip(&energies)
        .map(|(n, e)| format!("N={n}: {e:.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    report.push(
        "energy-band",
        spread < ENERGY_BAND,
        format!("{listed}; spread {:.3}%", 100.0 * spread),
    );
    report
}
