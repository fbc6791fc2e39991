//! Physical and dimensionless parameters of the moving-boundary problem.
//!
//! The physical model lives on `0 < x < s(t)`; the solver works on the fixed
//! interval `0 < y < 1` after the change of variables `y = x / s(t)` and the
//! scalings
//!
//! ```text
//! tau = D t / s0^2     u = m / m0     h = s / s0
//! Bi  = beta s0 / D    A0 = a0 m0 s0 / D
//! ```
//!
//! which leave only `Bi`, `A0` and `H` as coefficients of the transformed
//! system.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid physical parameters: {0}")]
    InvalidParameters(String),
    #[error("non-finite value for {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("tabulated function needs at least one point with strictly increasing abscissae")]
    BadTable,
}

/// A scalar coefficient function of one variable.
///
/// `Linear(c)` is `x -> c * x`. Tables are interpolated linearly and held
/// constant outside their range.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Linear(f64),
    Tabulated(Vec<(f64, f64)>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "constant({c})"),
            Coefficient::Linear(c) => write!(f, "linear({c})"),
            Coefficient::Tabulated(t) => write!(f, "table({} points)", t.len()),
            Coefficient::Custom(_) => write!(f, "custom(..)"),
        }
    }
}

/// Structural equality; custom closures never compare equal.
impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coefficient::Constant(a), Coefficient::Constant(b)) => a == b,
            (Coefficient::Linear(a), Coefficient::Linear(b)) => a == b,
            (Coefficient::Tabulated(a), Coefficient::Tabulated(b)) => a == b,
            _ => false,
        }
    }
}

impl Coefficient {
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty()
            || points.windows(2).any(|w| w[1].0 <= w[0].0)
            || points.iter().any(|(x, v)| !x.is_finite() || !v.is_finite())
        {
            return Err(ModelError::BadTable);
        }
        Ok(Coefficient::Tabulated(points))
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Linear(c) => c * x,
            Coefficient::Tabulated(t) => interp_table(t, x),
            Coefficient::Custom(f) => f(x),
        }
    }

    /// True when the function is known to stay bounded on `[0, inf)`.
    pub fn is_bounded(&self) -> bool {
        match self {
            Coefficient::Constant(_) | Coefficient::Tabulated(_) => true,
            Coefficient::Linear(c) => *c == 0.0,
            // unknown; treated as bounded and sampled instead
            Coefficient::Custom(_) => true,
        }
    }
}

fn interp_table(t: &[(f64, f64)], x: f64) -> f64 {
    let first = t[0];
    let last = t[t.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = t.partition_point(|p| p.0 <= x) - 1;
    let (x0, v0) = t[i];
    let (x1, v1) = t[i + 1];
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

/// A coefficient composed with affine rescalings: `x -> value_scale * f(arg_scale * x)`.
#[derive(Debug, Clone)]
pub struct ScaledCoefficient {
    pub base: Coefficient,
    pub arg_scale: f64,
    pub value_scale: f64,
}

impl ScaledCoefficient {
    pub fn identity(base: Coefficient) -> Self {
        Self {
            base,
            arg_scale: 1.0,
            value_scale: 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.value_scale * self.base.eval(self.arg_scale * x)
    }
}

#[derive(Debug, Clone)]
pub struct PhysicalParameters {
    /// Diffusivity `D` [mm^2/min].
    pub diffusivity: f64,
    /// Interface capacity `beta` at `x = 0` [mm/min].
    pub beta: f64,
    /// Henry constant `H` [-].
    pub henry: f64,
    /// Kinetic coefficient `a0` of the interface law.
    pub a0: f64,
    /// Initial interface position `s0` [mm].
    pub s0: f64,
    /// Concentration scale `m0` [gram/mm^3].
    pub m0: f64,
    /// Maximal interface position `L` [mm].
    pub l_max: f64,
    /// Final physical time `Tf` [min].
    pub t_final: f64,
    /// Boundary concentration `b(t)` as a function of physical time.
    pub b: Coefficient,
    /// Interface resistance `sigma(s)` as a function of position.
    pub sigma: Coefficient,
    /// Optional saturation level `c0`; sigma is clamped to it when set.
    pub sigma_plateau: Option<f64>,
}

impl PhysicalParameters {
    /// The rubber penetration experiment: `Tf = 10 min`,
    /// `s0 = 0.01 mm`, `m0 = 0.1`, `b = 1`, `D = 3.66e-4`, `beta = 0.564`,
    /// `H = 2.5`, `sigma(s) = s / 10`, `a0 = 50`.
    pub fn rubber_experiment() -> Self {
        Self {
            diffusivity: 3.66e-4,
            beta: 0.564,
            henry: 2.5,
            a0: 50.0,
            s0: 0.01,
            m0: 0.1,
            l_max: DEFAULT_L_MAX,
            t_final: 10.0,
            b: Coefficient::Constant(1.0),
            sigma: Coefficient::Linear(0.1),
            sigma_plateau: None,
        }
    }

    /// Positivity and ordering checks (A1 and `0 < s0 < L`).
    pub fn violations(&self) -> Vec<(Assumption, String)> {
        let mut out = Vec::new();
        let positive = [
            ("D", self.diffusivity),
            ("beta", self.beta),
            ("H", self.henry),
            ("a0", self.a0),
            ("s0", self.s0),
            ("m0", self.m0),
            ("Tf", self.t_final),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                out.push((
                    Assumption::A1,
                    format!("{name} must be positive and finite, got {v}"),
                ));
            }
        }
        if !(self.l_max.is_finite() && self.l_max > self.s0) {
            out.push((
                Assumption::A1,
                format!("L must exceed s0 (L = {}, s0 = {})", self.l_max, self.s0),
            ));
        }
        out
    }
}

/// Default cap on the physical interface position [mm].
pub const DEFAULT_L_MAX: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct DimensionlessParameters {
    pub biot: f64,
    pub a0: f64,
    pub henry: f64,
    /// `tau -> b(tau) / m0`.
    pub b_scaled: ScaledCoefficient,
    /// `h -> sigma(h) / m0`.
    pub sigma_scaled: ScaledCoefficient,
    /// Saturation plateau for `sigma_scaled`, already divided by `m0`.
    pub sigma_plateau: Option<f64>,
    /// Final dimensionless time `T`.
    pub t_final: f64,
    /// Initial profile on `[0, 1]`.
    pub u0: ScaledCoefficient,
    /// Cap `L / s0` on the interface position.
    pub h_max: f64,
}

impl DimensionlessParameters {
    /// Parameters given directly in transformed variables, with `b` and
    /// `sigma` already divided by `m0`.
    #[allow(clippy::too_many_arguments)]
    pub fn direct(
        biot: f64,
        a0: f64,
        henry: f64,
        b_scaled: Coefficient,
        sigma_scaled: Coefficient,
        u0: Coefficient,
        t_final: f64,
        h_max: f64,
    ) -> Self {
        Self {
            biot,
            a0,
            henry,
            b_scaled: ScaledCoefficient::identity(b_scaled),
            sigma_scaled: ScaledCoefficient::identity(sigma_scaled),
            sigma_plateau: None,
            t_final,
            u0: ScaledCoefficient::identity(u0),
            h_max,
        }
    }

    /// No influx and a frozen interface: every constant profile is steady.
    pub fn zero_coupling(u0: f64, t_final: f64) -> Self {
        Self::direct(
            0.0,
            0.0,
            1.0,
            Coefficient::Constant(1.0),
            Coefficient::Constant(0.0),
            Coefficient::Constant(u0),
            t_final,
            10.0,
        )
    }

    pub fn eval_b(&self, tau: f64) -> Result<f64, ModelError> {
        let v = self.b_scaled.eval(tau);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ModelError::NonFinite {
                what: "b",
                value: v,
            })
        }
    }

    /// `sigma(h) / m0`, zero for negative arguments and clamped at the
    /// plateau when one is configured.
    pub fn eval_sigma(&self, h: f64) -> Result<f64, ModelError> {
        if h < 0.0 {
            return Ok(0.0);
        }
        let mut v = self.sigma_scaled.eval(h);
        if let Some(c0) = self.sigma_plateau {
            v = v.min(c0);
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ModelError::NonFinite {
                what: "sigma",
                value: v,
            })
        }
    }

    pub fn eval_u0(&self, y: f64) -> f64 {
        self.u0.eval(y)
    }
}

/// Maps the physical problem onto the fixed unit interval.
///
/// `u0_physical` is the initial concentration as a function of `x` in mm.
pub fn nondimensionalize(
    p: &PhysicalParameters,
    u0_physical: &Coefficient,
) -> Result<DimensionlessParameters, ModelError> {
    let violations = p.violations();
    if !violations.is_empty() {
        let msg = violations
            .iter()
            .map(|(_, m)| m.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(ModelError::InvalidParameters(msg));
    }
    let (d, s0, m0) = (p.diffusivity, p.s0, p.m0);
    let biot = p.beta * s0 / d;
    let a0 = p.a0 * m0 * s0 / d;
    let t_final = d * p.t_final / (s0 * s0);
    let h_max = p.l_max / s0;
    for (what, value) in [("Bi", biot), ("A0", a0), ("T", t_final), ("h_max", h_max)] {
        if !value.is_finite() {
            return Err(ModelError::NonFinite { what, value });
        }
    }
    Ok(DimensionlessParameters {
        biot,
        a0,
        henry: p.henry,
        b_scaled: ScaledCoefficient {
            base: p.b.clone(),
            arg_scale: s0 * s0 / d,
            value_scale: 1.0 / m0,
        },
        sigma_scaled: ScaledCoefficient {
            base: p.sigma.clone(),
            arg_scale: s0,
            value_scale: 1.0 / m0,
        },
        sigma_plateau: p.sigma_plateau.map(|c| c / m0),
        t_final,
        u0: ScaledCoefficient {
            base: u0_physical.clone(),
            arg_scale: s0,
            value_scale: 1.0 / m0,
        },
        h_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Assumption {
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<(Assumption, String)>,
    pub warnings: Vec<String>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "assumptions: {}",
            if self.passed { "passed" } else { "FAILED" }
        )?;
        for (a, m) in &self.violations {
            writeln!(f, "  violation {a}: {m}")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

const VALIDATION_SAMPLES: usize = 1001;

/// Checks (A1)-(A5) on a sample of the coefficient functions.
///
/// Never fails; every finding goes into the report.
pub fn validate_assumptions(d: &DimensionlessParameters) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    for (name, v) in [
        ("Bi", d.biot),
        ("A0", d.a0),
        ("H", d.henry),
        ("T", d.t_final),
    ] {
        if !(v.is_finite() && v > 0.0) {
            violations.push((
                Assumption::A1,
                format!("{name} must be positive and finite, got {v}"),
            ));
        }
    }
    if !(d.h_max.is_finite() && d.h_max > 1.0) {
        violations.push((
            Assumption::A1,
            format!("h_max must exceed 1, got {}", d.h_max),
        ));
    }

    // b bounds on [0, T]
    let t_end = if d.t_final.is_finite() && d.t_final > 0.0 {
        d.t_final
    } else {
        0.0
    };
    let (mut b_min, mut b_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..VALIDATION_SAMPLES {
        let tau = t_end * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
        let v = d.b_scaled.eval(tau);
        if !v.is_finite() {
            violations.push((Assumption::A2, format!("b is not finite at tau = {tau}")));
            b_min = f64::NAN;
            break;
        }
        b_min = b_min.min(v);
        b_max = b_max.max(v);
    }
    if b_min.is_finite() && b_min <= 0.0 {
        violations.push((
            Assumption::A2,
            format!("0 < b_* <= b must hold, but min b/m0 = {b_min}"),
        ));
    }

    // sigma on [0, h_max]
    let h_end = if d.h_max.is_finite() && d.h_max > 0.0 {
        d.h_max
    } else {
        1.0
    };
    let mut prev = f64::NEG_INFINITY;
    let mut decreasing_at = None;
    let mut sigma_ok = true;
    for i in 0..VALIDATION_SAMPLES {
        let h = h_end * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
        match d.eval_sigma(h) {
            Ok(v) => {
                if v < 0.0 && sigma_ok {
                    violations.push((Assumption::A4, format!("sigma is negative at h = {h}")));
                    sigma_ok = false;
                }
                if v < prev && decreasing_at.is_none() {
                    decreasing_at = Some(h);
                }
                prev = v;
            }
            Err(_) => {
                violations.push((Assumption::A4, format!("sigma is not finite at h = {h}")));
                sigma_ok = false;
                break;
            }
        }
    }
    if let Some(h) = decreasing_at {
        violations.push((Assumption::A4, format!("sigma decreases near h = {h}")));
    }
    if d.sigma_plateau.is_none() && !d.sigma_scaled.base.is_bounded() {
        warnings.push(
            "A4: sigma has no saturation plateau (unbounded growth); running with the raw coefficient"
                .to_string(),
        );
    }
    if let Some(c0) = d.sigma_plateau {
        let at_start = d.sigma_scaled.eval(1.0);
        if at_start >= c0 {
            violations.push((
                Assumption::A5,
                format!("initial position is already at the sigma plateau (sigma(1)/m0 = {at_start} >= {c0})"),
            ));
        }
    }

    // sigma(0) <= u0 <= b*/H
    if sigma_ok && b_max.is_finite() && d.henry > 0.0 {
        let lower = d.eval_sigma(0.0).unwrap_or(0.0);
        let upper = b_max / d.henry;
        for i in 0..VALIDATION_SAMPLES {
            let y = i as f64 / (VALIDATION_SAMPLES - 1) as f64;
            let u = d.eval_u0(y);
            if !(u.is_finite() && u >= lower && u <= upper) {
                violations.push((
                    Assumption::A5,
                    format!("sigma(0) <= u0 <= b*/H fails at y = {y}: u0 = {u}, bounds [{lower}, {upper}]"),
                ));
                break;
            }
        }
    }

    ValidationReport {
        passed: violations.is_empty(),
        violations,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn experiment() -> DimensionlessParameters {
        let p = PhysicalParameters::rubber_experiment();
        nondimensionalize(&p, &Coefficient::Constant(p.m0)).unwrap()
    }

    #[test]
    fn experiment_groups() {
        let d = experiment();
        assert_relative_eq!(d.biot, 15.40983606557377, max_relative = 1e-12);
        assert_relative_eq!(d.a0, 136.61202185792348, max_relative = 1e-12);
        assert_relative_eq!(d.t_final, 36.6, max_relative = 1e-12);
        assert_relative_eq!(d.eval_sigma(1.0).unwrap(), 0.01, max_relative = 1e-12);
        assert_eq!(d.eval_b(0.0).unwrap(), 10.0);
        assert_eq!(d.eval_b(17.3).unwrap(), 10.0);
        assert_eq!(d.eval_u0(0.3), 1.0);
    }

    #[test]
    fn unit_scales() {
        let p = PhysicalParameters {
            diffusivity: 1.0,
            beta: 1.0,
            henry: 1.0,
            a0: 1.0,
            s0: 1.0,
            m0: 1.0,
            l_max: 2.0,
            t_final: 1.0,
            b: Coefficient::Constant(1.0),
            sigma: Coefficient::Constant(0.0),
            sigma_plateau: None,
        };
        let d = nondimensionalize(&p, &Coefficient::Constant(1.0)).unwrap();
        assert_eq!((d.biot, d.a0, d.t_final), (1.0, 1.0, 1.0));
    }

    #[test]
    fn rejects_zero_diffusivity() {
        let mut p = PhysicalParameters::rubber_experiment();
        p.diffusivity = 0.0;
        assert!(nondimensionalize(&p, &Coefficient::Constant(0.1)).is_err());
        let mut p = PhysicalParameters::rubber_experiment();
        p.s0 = 0.0;
        assert!(nondimensionalize(&p, &Coefficient::Constant(0.1)).is_err());
    }

    #[test]
    fn sigma_vanishes_for_negative_positions() {
        let d = experiment();
        assert_eq!(d.eval_sigma(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn plateau_clamps_sigma() {
        let mut d = experiment();
        d.sigma_plateau = Some(0.5);
        assert_eq!(d.eval_sigma(1000.0).unwrap(), 0.5);
        assert_relative_eq!(d.eval_sigma(2.0).unwrap(), 0.02, max_relative = 1e-12);
    }

    #[test]
    fn experiment_configuration_passes_with_warning() {
        let r = validate_assumptions(&experiment());
        assert!(r.passed, "{r}");
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("plateau"));
    }

    #[test]
    fn zero_boundary_concentration_is_a2_violation() {
        let mut d = experiment();
        d.b_scaled = ScaledCoefficient::identity(Coefficient::Constant(0.0));
        let r = validate_assumptions(&d);
        assert!(!r.passed);
        assert!(r.violations.iter().any(|(a, _)| *a == Assumption::A2));
    }

    #[test]
    fn a5_is_non_strict() {
        let mut d = experiment();
        // b*/H = 10 / 2.5 = 4
        d.u0 = ScaledCoefficient::identity(Coefficient::Constant(4.0));
        d.sigma_scaled = ScaledCoefficient::identity(Coefficient::Linear(0.01));
        let r = validate_assumptions(&d);
        assert!(r.passed, "{r}");
        d.u0 = ScaledCoefficient::identity(Coefficient::Constant(4.0 + 1e-9));
        assert!(!validate_assumptions(&d).passed);
    }

    #[test]
    fn report_is_total_on_garbage() {
        let mut d = experiment();
        d.biot = f64::NAN;
        d.t_final = -1.0;
        d.h_max = 0.5;
        d.sigma_scaled = ScaledCoefficient::identity(Coefficient::custom(|_| f64::INFINITY));
        let r = validate_assumptions(&d);
        assert!(!r.passed);
        assert_eq!(r.passed, r.violations.is_empty());
    }

    #[test]
    fn table_interpolation() {
        let c = Coefficient::tabulated(vec![(0.0, 1.0), (2.0, 3.0), (4.0, 3.0)]).unwrap();
        assert_eq!(c.eval(-1.0), 1.0);
        assert_eq!(c.eval(1.0), 2.0);
        assert_eq!(c.eval(3.0), 3.0);
        assert_eq!(c.eval(9.0), 3.0);
        assert!(Coefficient::tabulated(vec![(1.0, 0.0), (1.0, 2.0)]).is_err());
        assert!(Coefficient::tabulated(vec![]).is_err());
    }
}
