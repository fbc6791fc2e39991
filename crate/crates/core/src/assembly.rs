//! P1 mass, stiffness and convection matrices of the transformed weak form.
//!
//! With hat functions `phi_i` on the mesh,
//!
//! ```text
//! M_ij = int phi_j  phi_i      S_ij = int phi_j' phi_i'      C_ij = int y phi_j' phi_i
//! ```
//!
//! Each element integral is evaluated with 2-point Gauss, which is exact for
//! the cubic integrand of `C`.

use crate::linalg::TridiagonalMatrix;
use crate::mesh::Mesh1D;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("interface value must be positive, got {0}")]
    NonPositiveInterface(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub mass: TridiagonalMatrix,
    pub stiffness: TridiagonalMatrix,
    pub convection: TridiagonalMatrix,
}

const GAUSS_2: [(f64, f64); 2] = [
    (-0.577_350_269_189_625_8, 1.0),
    (0.577_350_269_189_625_8, 1.0),
];

pub fn assemble(mesh: &Mesh1D) -> ElementMatrices {
    let n = mesh.n_nodes();
    let mut mass = TridiagonalMatrix::zeros(n);
    let mut stiffness = TridiagonalMatrix::zeros(n);
    let mut convection = TridiagonalMatrix::zeros(n);
    let nodes = mesh.nodes();

    for (e, &k) in mesh.element_sizes().iter().enumerate() {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let grads = [-1.0 / k, 1.0 / k];
        let mut m_loc = [[0.0; 2]; 2];
        let mut c_loc = [[0.0; 2]; 2];
        for (xi, w) in GAUSS_2 {
            let y = 0.5 * (a + b) + 0.5 * k * xi;
            let jw = 0.5 * k * w;
            let phi = [(b - y) / k, (y - a) / k];
            for i in 0..2 {
                for j in 0..2 {
                    m_loc[i][j] += jw * phi[j] * phi[i];
                    c_loc[i][j] += jw * y * grads[j] * phi[i];
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                mass.add(e + i, e + j, m_loc[i][j]);
                stiffness.add(e + i, e + j, grads[i] * grads[j] * k);
                convection.add(e + i, e + j, c_loc[i][j]);
            }
        }
    }

    ElementMatrices {
        mass,
        stiffness,
        convection,
    }
}

/// Endpoint terms of the discrete equation, written so that they add to the
/// right-hand side: `(Bi / w_next) (b/m0 - H u(0))` at the first node and
/// `-(dW / w_next) u(1)` at the last.
#[allow(clippy::too_many_arguments)]
pub fn boundary_load(
    bi: f64,
    b_over_m0: f64,
    henry: f64,
    u_at_0: f64,
    w_next: f64,
    dw: f64,
    u_at_1: f64,
    n_nodes: usize,
) -> Result<Vec<f64>, AssemblyError> {
    let mut load = vec![0.0; n_nodes];
    add_boundary_load(&mut load, bi, b_over_m0, henry, u_at_0, w_next, dw, u_at_1)?;
    Ok(load)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn add_boundary_load(
    rhs: &mut [f64],
    bi: f64,
    b_over_m0: f64,
    henry: f64,
    u_at_0: f64,
    w_next: f64,
    dw: f64,
    u_at_1: f64,
) -> Result<(), AssemblyError> {
    if w_next.is_nan() || w_next <= 0.0 {
        return Err(AssemblyError::NonPositiveInterface(w_next));
    }
    let last = rhs.len() - 1;
    rhs[0] += bi / w_next * (b_over_m0 - henry * u_at_0);
    rhs[last] -= dw / w_next * u_at_1;
    Ok(())
}
