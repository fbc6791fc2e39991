//! Meshes of `[0, 1]` and continuous piecewise-linear (P1) functions on them.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("a mesh needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("mesh nodes must increase strictly from 0 to 1 (problem at index {0})")]
    BadNodes(usize),
    #[error("coefficient vector has length {got}, mesh has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite nodal value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("evaluation point {0} lies outside [0, 1]")]
    OutOfDomain(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    element_sizes: Vec<f64>,
    k_max: f64,
}

impl Mesh1D {
    pub fn uniform(n_nodes: usize) -> Result<Self, MeshError> {
        if n_nodes < 2 {
            return Err(MeshError::TooFewNodes(n_nodes));
        }
        let last = (n_nodes - 1) as f64;
        let nodes = (0..n_nodes).map(|i| i as f64 / last).collect();
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, MeshError> {
        if nodes.len() < 2 {
            return Err(MeshError::TooFewNodes(nodes.len()));
        }
        if nodes[0] != 0.0 {
            return Err(MeshError::BadNodes(0));
        }
        if nodes[nodes.len() - 1] != 1.0 {
            return Err(MeshError::BadNodes(nodes.len() - 1));
        }
        let element_sizes: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = element_sizes.iter().position(|&k| k.is_nan() || k <= 0.0) {
            return Err(MeshError::BadNodes(i + 1));
        }
        let k_max = element_sizes.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            nodes,
            element_sizes,
            k_max,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element_sizes(&self) -> &[f64] {
        &self.element_sizes
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.element_sizes.len()
    }

    /// Index of the element `[y_i, y_{i+1}]` containing `y`.
    /// Points on an interior node map to the element on their right.
    pub fn locate(&self, y: f64) -> usize {
        let i = self.nodes.partition_point(|&n| n <= y);
        i.saturating_sub(1).min(self.n_elements() - 1)
    }
}

/// A member of the P1 space on a mesh, stored by its nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Function {
    mesh: Arc<Mesh1D>,
    coeffs: Vec<f64>,
}

impl P1Function {
    pub fn new(mesh: Arc<Mesh1D>, coeffs: Vec<f64>) -> Result<Self, MeshError> {
        if coeffs.len() != mesh.n_nodes() {
            return Err(MeshError::LengthMismatch {
                expected: mesh.n_nodes(),
                got: coeffs.len(),
            });
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn constant(mesh: Arc<Mesh1D>, value: f64) -> Self {
        let coeffs = vec![value; mesh.n_nodes()];
        Self { mesh, coeffs }
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn at_left(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn at_right(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn eval(&self, y: f64) -> Result<f64, MeshError> {
        if !(0.0..=1.0).contains(&y) {
            return Err(MeshError::OutOfDomain(y));
        }
        Ok(self.eval_unchecked(y))
    }

    fn eval_unchecked(&self, y: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let i = self.mesh.locate(y);
        if y == nodes[i] {
            return self.coeffs[i];
        }
        if y == nodes[i + 1] {
            return self.coeffs[i + 1];
        }
        let t = (y - nodes[i]) / self.mesh.element_sizes()[i];
        self.coeffs[i] + t * (self.coeffs[i + 1] - self.coeffs[i])
    }

    /// Slope on element `i`.
    fn slope(&self, i: usize) -> f64 {
        (self.coeffs[i + 1] - self.coeffs[i]) / self.mesh.element_sizes()[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.mesh
            .element_sizes()
            .iter()
            .zip(self.coeffs.windows(2))
            .map(|(&k, w)| linear_sq_integral(k, w[0], w[1]))
            .sum()
    }

    pub fn h1_semi_norm_sq(&self) -> f64 {
        (0..self.mesh.n_elements())
            .map(|i| self.slope(i).powi(2) * self.mesh.element_sizes()[i])
            .sum()
    }
}

/// Exact integral of `g^2` over an interval of length `k` where `g` is linear
/// with end values `a` and `b`.
#[inline]
fn linear_sq_integral(k: f64, a: f64, b: f64) -> f64 {
    k * (a * a + a * b + b * b) / 3.0
}

/// Lagrange interpolant `I_k f`.
pub fn interpolate(f: impl Fn(f64) -> f64, mesh: &Arc<Mesh1D>) -> Result<P1Function, MeshError> {
    let coeffs = mesh
        .nodes()
        .iter()
        .enumerate()
        .map(|(index, &y)| {
            let value = f(y);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(MeshError::NonFinite { index, value })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(P1Function {
        mesh: Arc::clone(mesh),
        coeffs,
    })
}

/// Walks the union of both node sets, handing each merged element
/// `(length, g1(left), g1(right), g2(left), g2(right))` to `visit`.
fn for_each_merged_element(
    g1: &P1Function,
    g2: &P1Function,
    mut visit: impl FnMut(f64, f64, f64, f64, f64),
) {
    if Arc::ptr_eq(&g1.mesh, &g2.mesh) || g1.mesh.nodes() == g2.mesh.nodes() {
        let sizes = g1.mesh.element_sizes();
        for (i, &k) in sizes.iter().enumerate() {
            visit(
                k,
                g1.coeffs[i],
                g1.coeffs[i + 1],
                g2.coeffs[i],
                g2.coeffs[i + 1],
            );
        }
        return;
    }
    let n1 = g1.mesh.nodes();
    let n2 = g2.mesh.nodes();
    let (mut i, mut j) = (0usize, 0usize);
    let mut y = 0.0;
    let mut v1 = g1.coeffs[0];
    let mut v2 = g2.coeffs[0];
    while i + 1 < n1.len() && j + 1 < n2.len() {
        let next1 = n1[i + 1];
        let next2 = n2[j + 1];
        let y_next = next1.min(next2);
        let w1 = if y_next == next1 {
            g1.coeffs[i + 1]
        } else {
            g1.coeffs[i] + (y_next - n1[i]) * g1.slope(i)
        };
        let w2 = if y_next == next2 {
            g2.coeffs[j + 1]
        } else {
            g2.coeffs[j] + (y_next - n2[j]) * g2.slope(j)
        };
        if y_next > y {
            visit(y_next - y, v1, w1, v2, w2);
        }
        y = y_next;
        v1 = w1;
        v2 = w2;
        if y_next == next1 {
            i += 1;
        }
        if y_next == next2 {
            j += 1;
        }
    }
}

/// `||g1 - g2||_{L2(0,1)}`, integrated exactly on the merged mesh.
pub fn l2_diff(g1: &P1Function, g2: &P1Function) -> f64 {
    let mut acc = 0.0;
    for_each_merged_element(g1, g2, |k, a1, b1, a2, b2| {
        acc += linear_sq_integral(k, a1 - a2, b1 - b2);
    });
    acc.sqrt()
}

/// `|g1 - g2|_{H1(0,1)}`, the L2 norm of the derivative difference.
pub fn h1_semi_diff(g1: &P1Function, g2: &P1Function) -> f64 {
    let mut acc = 0.0;
    for_each_merged_element(g1, g2, |k, a1, b1, a2, b2| {
        let slope = ((b1 - a1) - (b2 - a2)) / k;
        acc += slope * slope * k;
    });
    acc.sqrt()
}
