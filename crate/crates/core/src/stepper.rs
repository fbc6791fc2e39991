//! Fully discrete scheme: explicit interface update followed by a linearly
//! implicit P1 / backward Euler solve for the concentration.
//!
//! One step from `(U^n, W^n)`:
//!
//! ```text
//! dW      = A0 (U^n(1) - sigma(W^n)/m0)
//! W^{n+1} = W^n + dt dW
//! (M/dt - dW/W^{n+1} C + S/(W^{n+1})^2) U^{n+1}
//!         = M U^n/dt + Bi/W^{n+1} (b/m0 - H U^n(0)) e_0 - dW/W^{n+1} U^n(1) e_last
//! ```
//!
//! `b` is evaluated at `tau^n`, together with the explicit `U^n(0)` it
//! multiplies.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::assembly::{add_boundary_load, assemble, ElementMatrices};
use crate::linalg::{thomas_solve_into, LinalgError, TridiagonalMatrix};
use crate::mesh::{interpolate, Mesh1D, MeshError, P1Function};
use crate::model::{DimensionlessParameters, ModelError, PhysicalParameters};

/// Nodal values beyond this magnitude abort the run.
pub const BLOW_UP_LIMIT: f64 = 1e6;

/// Relative tolerance for `dt` dividing the final time.
pub const DIVISIBILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BreakdownReason {
    NonPositiveInterface(f64),
    InterfaceAboveCap { w: f64, cap: f64 },
    BlowUp(f64),
    NonFinite,
    ZeroPivot(usize),
    Coefficient(ModelError),
}

impl fmt::Display for BreakdownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveInterface(w) => write!(f, "interface value {w} is not positive"),
            Self::InterfaceAboveCap { w, cap } => {
                write!(f, "interface value {w} exceeds the cap {cap}")
            }
            Self::BlowUp(v) => write!(f, "max |U| = {v} exceeds {BLOW_UP_LIMIT}"),
            Self::NonFinite => write!(f, "non-finite nodal value"),
            Self::ZeroPivot(i) => write!(f, "zero pivot at row {i}"),
            Self::Coefficient(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("stability breakdown at step {step}: {reason}")]
    StabilityBreakdown {
        step: usize,
        reason: BreakdownReason,
    },
    #[error("time step {dt} must be positive and divide T = {t_final}")]
    InvalidTimeStep { dt: f64, t_final: f64 },
    #[error("record interval must be at least 1")]
    InvalidRecordInterval,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub step_index: usize,
    pub tau: f64,
    pub u: P1Function,
    pub w: f64,
}

impl DiscreteState {
    /// `U^0 = I_k u0`, `W^0 = 1`.
    pub fn initial(d: &DimensionlessParameters, mesh: &Arc<Mesh1D>) -> Result<Self, StepError> {
        let u = interpolate(|y| d.eval_u0(y), mesh)?;
        Ok(Self {
            step_index: 0,
            tau: 0.0,
            u,
            w: 1.0,
        })
    }
}

/// `(W^{n+1}, dW)` from the explicit interface law.
pub fn step_boundary(
    state: &DiscreteState,
    d: &DimensionlessParameters,
    dt: f64,
) -> Result<(f64, f64), StepError> {
    let breakdown = |reason| StepError::StabilityBreakdown {
        step: state.step_index + 1,
        reason,
    };
    let sigma = d
        .eval_sigma(state.w)
        .map_err(|e| breakdown(BreakdownReason::Coefficient(e)))?;
    let dw = d.a0 * (state.u.at_right() - sigma);
    let w_next = state.w + dt * dw;
    if !w_next.is_finite() {
        return Err(breakdown(BreakdownReason::NonFinite));
    }
    if w_next <= 0.0 {
        return Err(breakdown(BreakdownReason::NonPositiveInterface(w_next)));
    }
    Ok((w_next, dw))
}

/// Per-step solver information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dw: f64,
    /// `||A U - rhs||_inf / max(1, ||rhs||_inf)`.
    pub relative_residual: f64,
}

/// One step of the scheme with freshly allocated work space.
pub fn step(
    state: &DiscreteState,
    mats: &ElementMatrices,
    d: &DimensionlessParameters,
    dt: f64,
) -> Result<DiscreteState, StepError> {
    let mut work = Workspace::new(state.u.mesh().n_nodes());
    work.advance(state, mats, d, dt).map(|(s, _)| s)
}

#[derive(Debug, Clone)]
struct Workspace {
    system: TridiagonalMatrix,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            system: TridiagonalMatrix::zeros(n),
            rhs: vec![0.0; n],
            scratch: Vec::with_capacity(n),
        }
    }

    fn advance(
        &mut self,
        state: &DiscreteState,
        mats: &ElementMatrices,
        d: &DimensionlessParameters,
        dt: f64,
    ) -> Result<(DiscreteState, StepInfo), StepError> {
        let step = state.step_index + 1;
        let breakdown = |reason| StepError::StabilityBreakdown { step, reason };

        let (w_next, dw) = step_boundary(state, d, dt)?;
        if w_next > d.h_max {
            return Err(breakdown(BreakdownReason::InterfaceAboveCap {
                w: w_next,
                cap: d.h_max,
            }));
        }

        let inv_dt = 1.0 / dt;
        let conv = -dw / w_next;
        let diff = 1.0 / (w_next * w_next);
        let (m, c, s) = (&mats.mass, &mats.convection, &mats.stiffness);
        let a = &mut self.system;
        let n = a.diag.len();
        for i in 0..n {
            a.diag[i] = inv_dt * m.diag[i] + conv * c.diag[i] + diff * s.diag[i];
        }
        for i in 0..n - 1 {
            a.lower[i] = inv_dt * m.lower[i] + conv * c.lower[i] + diff * s.lower[i];
            a.upper[i] = inv_dt * m.upper[i] + conv * c.upper[i] + diff * s.upper[i];
        }

        let u = state.u.coeffs();
        for i in 0..n {
            let mut mu = m.diag[i] * u[i];
            if i > 0 {
                mu += m.lower[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                mu += m.upper[i] * u[i + 1];
            }
            self.rhs[i] = inv_dt * mu;
        }
        let b = d
            .eval_b(state.tau)
            .map_err(|e| breakdown(BreakdownReason::Coefficient(e)))?;
        add_boundary_load(
            &mut self.rhs,
            d.biot,
            b,
            d.henry,
            state.u.at_left(),
            w_next,
            dw,
            state.u.at_right(),
        )
        .map_err(|_| breakdown(BreakdownReason::NonPositiveInterface(w_next)))?;

        let mut next = vec![0.0; n];
        thomas_solve_into(&self.system, &self.rhs, &mut self.scratch, &mut next).map_err(|e| {
            match e {
                LinalgError::ZeroPivot { index } => breakdown(BreakdownReason::ZeroPivot(index)),
                _ => breakdown(BreakdownReason::NonFinite),
            }
        })?;

        let mut max_abs = 0.0f64;
        for v in &next {
            if !v.is_finite() {
                return Err(breakdown(BreakdownReason::NonFinite));
            }
            max_abs = max_abs.max(v.abs());
        }
        if max_abs > BLOW_UP_LIMIT {
            return Err(breakdown(BreakdownReason::BlowUp(max_abs)));
        }

        let relative_residual = self.residual(&next);
        let u = P1Function::new(Arc::clone(state.u.mesh()), next)?;
        Ok((
            DiscreteState {
                step_index: step,
                tau: step as f64 * dt,
                u,
                w: w_next,
            },
            StepInfo {
                dw,
                relative_residual,
            },
        ))
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let a = &self.system;
        let n = x.len();
        let mut res = 0.0f64;
        let mut scale = 1.0f64;
        for i in 0..n {
            let mut s = a.diag[i] * x[i];
            if i > 0 {
                s += a.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += a.upper[i] * x[i + 1];
            }
            res = res.max((s - self.rhs[i]).abs());
            scale = scale.max(self.rhs[i].abs());
        }
        res / scale
    }
}

/// Reusable driver for many steps on one mesh with one time step.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: Arc<DimensionlessParameters>,
    mesh: Arc<Mesh1D>,
    mats: ElementMatrices,
    dt: f64,
    work: Workspace,
}

impl Stepper {
    pub fn new(
        params: Arc<DimensionlessParameters>,
        mesh: Arc<Mesh1D>,
        dt: f64,
    ) -> Result<Self, StepError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StepError::InvalidTimeStep {
                dt,
                t_final: params.t_final,
            });
        }
        let mats = assemble(&mesh);
        let work = Workspace::new(mesh.n_nodes());
        Ok(Self {
            params,
            mesh,
            mats,
            dt,
            work,
        })
    }

    pub fn params(&self) -> &Arc<DimensionlessParameters> {
        &self.params
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn matrices(&self) -> &ElementMatrices {
        &self.mats
    }

    pub fn initial_state(&self) -> Result<DiscreteState, StepError> {
        DiscreteState::initial(&self.params, &self.mesh)
    }

    /// Number of steps `M = T / dt`, checking divisibility.
    pub fn step_count(&self) -> Result<usize, StepError> {
        step_count(self.params.t_final, self.dt)
    }

    pub fn advance(
        &mut self,
        state: &DiscreteState,
    ) -> Result<(DiscreteState, StepInfo), StepError> {
        self.work.advance(state, &self.mats, &self.params, self.dt)
    }
}

pub fn step_count(t_final: f64, dt: f64) -> Result<usize, StepError> {
    let bad = || StepError::InvalidTimeStep { dt, t_final };
    if !(dt.is_finite() && dt > 0.0 && t_final.is_finite() && t_final > 0.0) {
        return Err(bad());
    }
    let m = (t_final / dt).round();
    if m < 1.0 || ((m * dt - t_final) / t_final).abs() > DIVISIBILITY_TOLERANCE {
        return Err(bad());
    }
    Ok(m as usize)
}

/// Running diagnostics collected at every step of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunDiagnostics {
    pub steps: usize,
    pub max_relative_residual: f64,
    /// First step `n` with `W^n < W^{n-1}`, if any.
    pub first_w_decrease: Option<usize>,
    /// Whether `U^n(1) >= sigma(W^n)/m0` held at every step taken.
    pub interface_driving_nonnegative: bool,
    pub u_min: f64,
    pub u_max: f64,
    pub w_final: f64,
    /// `max_{n>=1} ||U^n||^2` (the initial state when no step was taken).
    pub max_l2_sq: f64,
    /// `dt * sum_{j>=1} |U^j|_{H1}^2`.
    pub dissipation: f64,
}

impl RunDiagnostics {
    fn start(initial: &DiscreteState) -> Self {
        let (lo, hi) = min_max(initial.u.coeffs());
        Self {
            steps: 0,
            max_relative_residual: 0.0,
            first_w_decrease: None,
            interface_driving_nonnegative: true,
            u_min: lo,
            u_max: hi,
            w_final: initial.w,
            max_l2_sq: initial.u.l2_norm_sq(),
            dissipation: 0.0,
        }
    }

    fn record(&mut self, prev: &DiscreteState, next: &DiscreteState, info: &StepInfo, dt: f64) {
        if self.steps == 0 {
            self.max_l2_sq = 0.0;
        }
        self.steps += 1;
        self.max_relative_residual = self.max_relative_residual.max(info.relative_residual);
        if next.w < prev.w && self.first_w_decrease.is_none() {
            self.first_w_decrease = Some(next.step_index);
        }
        if info.dw < 0.0 {
            self.interface_driving_nonnegative = false;
        }
        let (lo, hi) = min_max(next.u.coeffs());
        self.u_min = self.u_min.min(lo);
        self.u_max = self.u_max.max(hi);
        self.w_final = next.w;
        self.max_l2_sq = self.max_l2_sq.max(next.u.l2_norm_sq());
        self.dissipation += dt * next.u.h1_semi_norm_sq();
    }

    pub fn w_monotone(&self) -> bool {
        self.first_w_decrease.is_none()
    }

    /// Discrete energy `max_n ||U^n||^2 + dt sum_j |U^j|_{H1}^2`.
    pub fn energy(&self) -> f64 {
        self.max_l2_sq + self.dissipation
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// States at every `record_every`-th step, plus the final one.
    pub states: Vec<DiscreteState>,
    pub params: Arc<DimensionlessParameters>,
    pub mesh: Arc<Mesh1D>,
    pub dt: f64,
    pub record_every: usize,
    pub diagnostics: RunDiagnostics,
}

impl Trajectory {
    pub fn last(&self) -> &DiscreteState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn is_complete_record(&self) -> bool {
        self.record_every == 1
    }
}

/// A run that stopped early, with everything computed up to the failure.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct RunFailure {
    pub error: StepError,
    pub partial: Option<Box<Trajectory>>,
}

impl From<StepError> for RunFailure {
    fn from(error: StepError) -> Self {
        Self {
            error,
            partial: None,
        }
    }
}

/// Iterates the scheme from `tau = 0` to `T`.
pub fn run(
    d: &DimensionlessParameters,
    mesh: &Mesh1D,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory, RunFailure> {
    run_shared(
        Arc::new(d.clone()),
        Arc::new(mesh.clone()),
        dt,
        record_every,
    )
}

pub fn run_shared(
    params: Arc<DimensionlessParameters>,
    mesh: Arc<Mesh1D>,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory, RunFailure> {
    if record_every == 0 {
        return Err(StepError::InvalidRecordInterval.into());
    }
    let m = step_count(params.t_final, dt)?;
    let mut stepper = Stepper::new(Arc::clone(&params), Arc::clone(&mesh), dt)?;
    let mut state = stepper.initial_state()?;
    let mut diagnostics = RunDiagnostics::start(&state);
    let mut states = Vec::with_capacity(m / record_every + 2);
    states.push(state.clone());

    for n in 0..m {
        match stepper.advance(&state) {
            Ok((next, info)) => {
                diagnostics.record(&state, &next, &info, dt);
                state = next;
                if (n + 1) % record_every == 0 || n + 1 == m {
                    states.push(state.clone());
                }
            }
            Err(error) => {
                if states.last().map(|s| s.step_index) != Some(state.step_index) {
                    states.push(state);
                }
                let partial = Trajectory {
                    states,
                    params,
                    mesh,
                    dt,
                    record_every,
                    diagnostics,
                };
                return Err(RunFailure {
                    error,
                    partial: Some(Box::new(partial)),
                });
            }
        }
    }

    Ok(Trajectory {
        states,
        params,
        mesh,
        dt,
        record_every,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSnapshot {
    /// Physical time [min].
    pub t: f64,
    /// Interface position [mm].
    pub s: f64,
    pub x_nodes: Vec<f64>,
    pub m_values: Vec<f64>,
}

/// Undoes the scaling and the front-fixing change of variables.
pub fn to_physical(traj: &Trajectory, p: &PhysicalParameters) -> Vec<PhysicalSnapshot> {
    traj.states.iter().map(|st| snapshot(st, p)).collect()
}

pub fn snapshot(st: &DiscreteState, p: &PhysicalParameters) -> PhysicalSnapshot {
    let s = p.s0 * st.w;
    PhysicalSnapshot {
        t: p.s0 * p.s0 * st.tau / p.diffusivity,
        s,
        x_nodes: st.u.mesh().nodes().iter().map(|y| s * y).collect(),
        m_values: st.u.coeffs().iter().map(|u| p.m0 * u).collect(),
    }
}
