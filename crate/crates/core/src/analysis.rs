//! Errors against fine reference runs and observed convergence orders.
//!
//! The exact solution is unknown, so every study compares against a run of
//! the same scheme on a finer mesh (space) or with a smaller time step
//! (time). Errors are maxima over *all* coarse time levels:
//!
//! ```text
//! err_u = max_n ||U^n - u_ref^n||_{L2(0,1)}     err_w = max_n |W^n - W_ref^n|
//! ```
//!
//! Runs are compared while they execute. The reference run streams its
//! states in chunks to a pool of coarse runs, so no trajectory is ever held
//! in memory in full.

use std::fmt;
use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::{l2_diff, Mesh1D, MeshError, P1Function};
use crate::model::DimensionlessParameters;
use crate::stepper::{step_count, DiscreteState, StepError, Stepper, Trajectory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("errors must be positive and the ratio above 1 (coarse {coarse}, fine {fine}, ratio {ratio})")]
    InvalidOrderInput { coarse: f64, fine: f64, ratio: f64 },
    #[error("time grids do not coincide: {0}")]
    NonCoincidentGrids(String),
    #[error("run at {resolution} failed: {error}")]
    Run {
        resolution: Resolution,
        error: StepError,
    },
    #[error("reference run at {resolution} failed: {error}")]
    Reference {
        resolution: Resolution,
        error: StepError,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("study needs at least one run")]
    EmptyStudy,
}

/// What was refined in a row of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Nodes(usize),
    TimeStep(f64),
}

impl Resolution {
    pub fn value(&self) -> f64 {
        match *self {
            Resolution::Nodes(n) => n as f64,
            Resolution::TimeStep(dt) => dt,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Nodes(n) => write!(f, "N = {n}"),
            Resolution::TimeStep(dt) => write!(f, "dt = {dt}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub resolution: Resolution,
    pub err_u: f64,
    pub err_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Space,
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub resolution: Resolution,
    pub err_u: f64,
    pub order_u: Option<f64>,
    pub err_w: f64,
    pub order_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub protocol: Protocol,
    pub reference: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Orders between consecutive rows whose resolutions differ by exactly
    /// a factor of two; the last row never carries an order.
    pub fn from_records(protocol: Protocol, reference: String, records: &[ErrorRecord]) -> Self {
        let rows = records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (order_u, order_w) = match records.get(i + 1) {
                    Some(next) if halves(r.resolution, next.resolution) => (
                        table_order(r.err_u, next.err_u),
                        table_order(r.err_w, next.err_w),
                    ),
                    _ => (None, None),
                };
                ConvergenceRow {
                    resolution: r.resolution,
                    err_u: r.err_u,
                    order_u,
                    err_w: r.err_w,
                    order_w,
                }
            })
            .collect();
        Self {
            protocol,
            reference,
            rows,
        }
    }

    pub fn orders_u(&self) -> Vec<Option<f64>> {
        self.rows[..self.rows.len().saturating_sub(1)]
            .iter()
            .map(|r| r.order_u)
            .collect()
    }

    pub fn orders_w(&self) -> Vec<Option<f64>> {
        self.rows[..self.rows.len().saturating_sub(1)]
            .iter()
            .map(|r| r.order_w)
            .collect()
    }
}

impl fmt::Display for ConvergenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.protocol {
            Protocol::Space => "N",
            Protocol::Time => "dt",
        };
        writeln!(f, "reference: {}", self.reference)?;
        writeln!(
            f,
            "{head:>12} {:>14} {:>8} {:>14} {:>8}",
            "err_u", "order", "err_w", "order"
        )?;
        let order = |o: Option<f64>| o.map_or(String::new(), |v| format!("{v:.3}"));
        for r in &self.rows {
            writeln!(
                f,
                "{:>12} {:>14.7e} {:>8} {:>14.7e} {:>8}",
                r.resolution.value(),
                r.err_u,
                order(r.order_u),
                r.err_w,
                order(r.order_w)
            )?;
        }
        Ok(())
    }
}

fn halves(coarse: Resolution, fine: Resolution) -> bool {
    match (coarse, fine) {
        (Resolution::Nodes(a), Resolution::Nodes(b)) => b == 2 * a,
        (Resolution::TimeStep(a), Resolution::TimeStep(b)) => ((a / b) - 2.0).abs() <= 1e-9,
        _ => false,
    }
}

/// Errors at or below this are rounding noise and get no order.
pub const ORDER_NOISE_FLOOR: f64 = 1e-13;

fn table_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse <= ORDER_NOISE_FLOOR || fine <= ORDER_NOISE_FLOOR {
        return None;
    }
    observed_order(coarse, fine, 2.0).ok()
}

/// `log(err_coarse / err_fine) / log(ratio)`.
pub fn observed_order(err_coarse: f64, err_fine: f64, ratio: f64) -> Result<f64, AnalysisError> {
    let valid = err_coarse > 0.0
        && err_fine > 0.0
        && ratio > 1.0
        && err_coarse.is_finite()
        && err_fine.is_finite()
        && ratio.is_finite();
    if !valid {
        return Err(AnalysisError::InvalidOrderInput {
            coarse: err_coarse,
            fine: err_fine,
            ratio,
        });
    }
    Ok((err_coarse / err_fine).ln() / ratio.ln())
}

/// Compares two stored trajectories at every time level of `traj`.
///
/// The reference time step must divide the coarse one and both runs must
/// reach the same final time.
pub fn error_against_reference(
    traj: &Trajectory,
    reference: &Trajectory,
) -> Result<ErrorRecord, AnalysisError> {
    let m = step_count(traj.params.t_final, traj.dt)
        .map_err(|e| AnalysisError::NonCoincidentGrids(e.to_string()))?;
    let m_ref = step_count(reference.params.t_final, reference.dt)
        .map_err(|e| AnalysisError::NonCoincidentGrids(e.to_string()))?;
    if m_ref % m != 0 {
        return Err(AnalysisError::NonCoincidentGrids(format!(
            "{m_ref} reference steps are not a multiple of {m}"
        )));
    }
    let ratio = m_ref / m;
    let mut err_u = 0.0f64;
    let mut err_w = 0.0f64;
    for st in &traj.states {
        let want = st.step_index * ratio;
        let found = reference
            .states
            .binary_search_by_key(&want, |s| s.step_index)
            .map_err(|_| {
                AnalysisError::NonCoincidentGrids(format!("reference has no state at step {want}"))
            })?;
        let r = &reference.states[found];
        err_u = err_u.max(l2_diff(&st.u, &r.u));
        err_w = err_w.max((st.w - r.w).abs());
    }
    let resolution = if traj.mesh.nodes() == reference.mesh.nodes() {
        Resolution::TimeStep(traj.dt)
    } else {
        Resolution::Nodes(traj.mesh.n_nodes())
    };
    Ok(ErrorRecord {
        resolution,
        err_u,
        err_w,
    })
}

/// `max_{n>=1} ||U^n||^2 + dt sum_{j>=1} |U^j|_{H1}^2`; the initial state
/// alone when the trajectory holds no step.
///
/// Exact for complete records; subsampled trajectories fall back on the
/// per-step diagnostics gathered during the run.
pub fn energy_report(traj: &Trajectory) -> f64 {
    if !traj.is_complete_record() {
        return traj.diagnostics.energy();
    }
    match traj.states.split_first() {
        None => 0.0,
        Some((first, [])) => first.u.l2_norm_sq(),
        Some((_, rest)) => {
            let max_l2 = rest.iter().map(|s| s.u.l2_norm_sq()).fold(0.0, f64::max);
            let grad: f64 = rest.iter().map(|s| s.u.h1_semi_norm_sq()).sum();
            max_l2 + traj.dt * grad
        }
    }
}

/// One run of a study.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub mesh: Arc<Mesh1D>,
    pub dt: f64,
}

impl RunSpec {
    pub fn uniform(n_nodes: usize, dt: f64) -> Result<Self, AnalysisError> {
        Ok(Self {
            mesh: Arc::new(Mesh1D::uniform(n_nodes)?),
            dt,
        })
    }
}

/// Reference states shipped to the coarse runs: `(step index, u, w)`.
type Chunk = Vec<(usize, P1Function, f64)>;

const CHUNK_TARGET: usize = 2048;

struct Tracker {
    resolution: Resolution,
    stepper: Stepper,
    state: DiscreteState,
    ratio: usize,
    err_u: f64,
    err_w: f64,
    failed: Option<StepError>,
}

impl Tracker {
    fn consume(&mut self, chunk: &Chunk) {
        for (ref_index, u_ref, w_ref) in chunk {
            if self.failed.is_some() {
                return;
            }
            if ref_index % self.ratio != 0 {
                continue;
            }
            let target = ref_index / self.ratio;
            while self.state.step_index < target {
                match self.stepper.advance(&self.state) {
                    Ok((next, _)) => self.state = next,
                    Err(e) => {
                        self.failed = Some(e);
                        return;
                    }
                }
            }
            self.err_u = self.err_u.max(l2_diff(&self.state.u, u_ref));
            self.err_w = self.err_w.max((self.state.w - w_ref).abs());
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Runs `reference` once and every entry of `runs` alongside it, returning
/// the max-over-time errors of each run in input order.
pub fn compare_with_reference(
    params: Arc<DimensionlessParameters>,
    reference: &RunSpec,
    runs: &[(Resolution, RunSpec)],
    reference_label: Resolution,
) -> Result<Vec<ErrorRecord>, AnalysisError> {
    if runs.is_empty() {
        return Err(AnalysisError::EmptyStudy);
    }
    let t_final = params.t_final;
    let ref_fail = |error| AnalysisError::Reference {
        resolution: reference_label,
        error,
    };
    let m_ref = step_count(t_final, reference.dt).map_err(ref_fail)?;

    let mut trackers = Vec::with_capacity(runs.len());
    for (resolution, spec) in runs {
        let fail = |error| AnalysisError::Run {
            resolution: *resolution,
            error,
        };
        let m = step_count(t_final, spec.dt).map_err(fail)?;
        if m_ref % m != 0 {
            return Err(AnalysisError::NonCoincidentGrids(format!(
                "{resolution}: {m} steps do not divide the {m_ref} reference steps"
            )));
        }
        let stepper =
            Stepper::new(Arc::clone(&params), Arc::clone(&spec.mesh), spec.dt).map_err(fail)?;
        let state = stepper.initial_state().map_err(fail)?;
        trackers.push(Tracker {
            resolution: *resolution,
            stepper,
            state,
            ratio: m_ref / m,
            err_u: 0.0,
            err_w: 0.0,
            failed: None,
        });
    }
    let stride = trackers.iter().map(|t| t.ratio).fold(0, gcd);
    let chunk_steps = stride * (CHUNK_TARGET / stride).max(1);

    let mut ref_stepper = Stepper::new(
        Arc::clone(&params),
        Arc::clone(&reference.mesh),
        reference.dt,
    )
    .map_err(ref_fail)?;
    let ref_initial = ref_stepper.initial_state().map_err(ref_fail)?;

    let ref_result = thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<Chunk>(2);
        let producer = scope.spawn(move || -> Result<(), StepError> {
            let mut state = ref_initial;
            let mut chunk: Chunk = vec![(0, state.u.clone(), state.w)];
            for n in 1..=m_ref {
                let (next, _) = ref_stepper.advance(&state)?;
                state = next;
                if n % stride == 0 {
                    chunk.push((n, state.u.clone(), state.w));
                }
                if (n % chunk_steps == 0 || n == m_ref)
                    && tx.send(std::mem::take(&mut chunk)).is_err()
                {
                    break;
                }
            }
            Ok(())
        });
        for chunk in rx {
            trackers.par_iter_mut().for_each(|t| t.consume(&chunk));
            // a failed run fails the whole study; stop the reference early
            if trackers.iter().any(|t| t.failed.is_some()) {
                break;
            }
        }
        producer.join().expect("reference thread panicked")
    });
    ref_result.map_err(ref_fail)?;

    trackers
        .into_iter()
        .map(|t| match t.failed {
            Some(error) => Err(AnalysisError::Run {
                resolution: t.resolution,
                error,
            }),
            None => Ok(ErrorRecord {
                resolution: t.resolution,
                err_u: t.err_u,
                err_w: t.err_w,
            }),
        })
        .collect()
}

/// Mesh refinement at a fixed time step.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceStudy {
    pub dt: f64,
    pub nodes: Vec<usize>,
    pub reference_nodes: usize,
}

impl Default for SpaceStudy {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            nodes: vec![20, 40, 80, 160, 320, 640],
            reference_nodes: 1280,
        }
    }
}

/// Time step refinement on a fixed mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStudy {
    pub n_nodes: usize,
    pub dts: Vec<f64>,
    pub reference_dt: f64,
}

impl TimeStudy {
    /// `base, base/2, ..., base/2^(levels-1)` against `base / reference_divisor`.
    pub fn halving(n_nodes: usize, base_dt: f64, levels: usize, reference_divisor: usize) -> Self {
        Self {
            n_nodes,
            dts: (0..levels)
                .map(|i| base_dt / f64::from(1u32 << i))
                .collect(),
            reference_dt: base_dt / reference_divisor as f64,
        }
    }
}

impl Default for TimeStudy {
    fn default() -> Self {
        Self::halving(320, 1e-3, 6, 64)
    }
}

pub fn space_study(
    params: &DimensionlessParameters,
    study: &SpaceStudy,
) -> Result<ConvergenceTable, AnalysisError> {
    let params = Arc::new(params.clone());
    let reference = RunSpec::uniform(study.reference_nodes, study.dt)?;
    let runs = study
        .nodes
        .iter()
        .map(|&n| Ok((Resolution::Nodes(n), RunSpec::uniform(n, study.dt)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let records = compare_with_reference(
        params,
        &reference,
        &runs,
        Resolution::Nodes(study.reference_nodes),
    )?;
    Ok(ConvergenceTable::from_records(
        Protocol::Space,
        format!("N = {} at dt = {}", study.reference_nodes, study.dt),
        &records,
    ))
}

pub fn time_study(
    params: &DimensionlessParameters,
    study: &TimeStudy,
) -> Result<ConvergenceTable, AnalysisError> {
    let params = Arc::new(params.clone());
    let mesh = Arc::new(Mesh1D::uniform(study.n_nodes)?);
    let reference = RunSpec {
        mesh: Arc::clone(&mesh),
        dt: study.reference_dt,
    };
    let runs: Vec<_> = study
        .dts
        .iter()
        .map(|&dt| {
            (
                Resolution::TimeStep(dt),
                RunSpec {
                    mesh: Arc::clone(&mesh),
                    dt,
                },
            )
        })
        .collect();
    let records = compare_with_reference(
        params,
        &reference,
        &runs,
        Resolution::TimeStep(study.reference_dt),
    )?;
    Ok(ConvergenceTable::from_records(
        Protocol::Time,
        format!("dt = {} on N = {}", study.reference_dt, study.n_nodes),
        &records,
    ))
}
