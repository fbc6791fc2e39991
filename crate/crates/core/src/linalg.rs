//! Tridiagonal matrices and the Thomas algorithm.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("zero pivot at row {index}")]
    ZeroPivot { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
}

/// Relative threshold below which a pivot counts as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Banded `n x n` matrix with sub-diagonal `lower[i] = A[i+1][i]`, diagonal
/// `diag[i] = A[i][i]` and super-diagonal `upper[i] = A[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub(crate) lower: Vec<f64>,
    pub(crate) diag: Vec<f64>,
    pub(crate) upper: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self, LinalgError> {
        let n = diag.len();
        let off = n.saturating_sub(1);
        if lower.len() != off {
            return Err(LinalgError::DimensionMismatch {
                expected: off,
                got: lower.len(),
            });
        }
        if upper.len() != off {
            return Err(LinalgError::DimensionMismatch {
                expected: off,
                got: upper.len(),
            });
        }
        if lower
            .iter()
            .chain(&diag)
            .chain(&upper)
            .any(|v| !v.is_finite())
        {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Self {
            lower: vec![0.0; off],
            diag: vec![0.0; n],
            upper: vec![0.0; off],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.diag.iter_mut().for_each(|d| *d = 1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie in the band.
    pub(crate) fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else if j == i + 1 {
            self.upper[i] += v;
        } else if i == j + 1 {
            self.lower[j] += v;
        } else {
            panic!("entry ({i}, {j}) is outside the tridiagonal band");
        }
    }

    /// `alpha * self + beta * other`, entrywise.
    pub fn lin_comb(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!(self.dim(), other.dim());
        let zip =
            |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect();
        Self {
            lower: zip(&self.lower, &other.lower),
            diag: zip(&self.diag, &other.diag),
            upper: zip(&self.upper, &other.upper),
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let mut s = self.diag[i];
                if i > 0 {
                    s += self.lower[i - 1];
                }
                if i + 1 < self.dim() {
                    s += self.upper[i];
                }
                s
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub matrix: TridiagonalMatrix,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(matrix: TridiagonalMatrix, rhs: Vec<f64>) -> Result<Self, LinalgError> {
        if rhs.len() != matrix.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: matrix.dim(),
                got: rhs.len(),
            });
        }
        Ok(Self { matrix, rhs })
    }
}

pub fn matvec(m: &TridiagonalMatrix, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.dim();
    if x.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = m.diag[i] * x[i];
        if i > 0 {
            s += m.lower[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            s += m.upper[i] * x[i + 1];
        }
        out.push(s);
    }
    Ok(out)
}

/// `||A x - rhs||_inf`.
pub fn residual_inf(sys: &TridiagonalSystem, x: &[f64]) -> Result<f64, LinalgError> {
    let ax = matvec(&sys.matrix, x)?;
    Ok(ax
        .iter()
        .zip(&sys.rhs)
        .fold(0.0, |m, (a, r)| m.max((a - r).abs())))
}

/// Solves the system by forward elimination and back substitution, without
/// pivoting.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>, LinalgError> {
    let mut scratch = Vec::new();
    let mut x = vec![0.0; sys.rhs.len()];
    thomas_solve_into(&sys.matrix, &sys.rhs, &mut scratch, &mut x)?;
    Ok(x)
}

/// Zero within tolerance, or NaN.
fn is_zero_pivot(pivot: f64, scale: f64) -> bool {
    pivot.is_nan() || pivot.abs() <= PIVOT_TOLERANCE * scale
}

/// Allocation-free variant used in the time loop; `scratch` is resized as
/// needed and `x` receives the solution.
pub fn thomas_solve_into(
    m: &TridiagonalMatrix,
    rhs: &[f64],
    scratch: &mut Vec<f64>,
    x: &mut [f64],
) -> Result<(), LinalgError> {
    let n = m.dim();
    if rhs.len() != n || x.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: rhs.len().min(x.len()),
        });
    }
    if n == 0 {
        return Ok(());
    }
    scratch.clear();
    scratch.resize(n, 0.0);
    let c = scratch;

    let row_scale = |i: usize| {
        let mut s = m.diag[i].abs();
        if i > 0 {
            s = s.max(m.lower[i - 1].abs());
        }
        if i + 1 < n {
            s = s.max(m.upper[i].abs());
        }
        s
    };

    let mut pivot = m.diag[0];
    if is_zero_pivot(pivot, row_scale(0)) {
        return Err(LinalgError::ZeroPivot { index: 0 });
    }
    if n > 1 {
        c[0] = m.upper[0] / pivot;
    }
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        let l = m.lower[i - 1];
        pivot = m.diag[i] - l * c[i - 1];
        if is_zero_pivot(pivot, row_scale(i)) {
            return Err(LinalgError::ZeroPivot { index: i });
        }
        if i + 1 < n {
            c[i] = m.upper[i] / pivot;
        }
        x[i] = (rhs[i] - l * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(())
}
