//! Brute-force reference implementations shared by the test targets.

#![allow(dead_code)]

use front_fem::linalg::TridiagonalMatrix;
use front_fem::mesh::Mesh1D;
use front_fem::model::DimensionlessParameters;
use rand::rngs::StdRng;
use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn random_mesh(rng: &mut StdRng, n: usize) -> Mesh1D {
    let mut inner: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.01..0.99)).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut nodes = vec![0.0];
    nodes.extend(inner);
    nodes.push(1.0);
    Mesh1D::from_nodes(nodes).unwrap()
}

/// Mass, stiffness and convection by a composite midpoint rule with
/// `points` samples per element.
pub fn midpoint_matrices(nodes: &[f64], points: usize) -> (Dense, Dense, Dense) {
    let n = nodes.len();
    let mut m = vec![vec![0.0; n]; n];
    let mut s = m.clone();
    let mut c = m.clone();
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = (b - a) / points as f64;
        for q in 0..points {
            let y = a + (q as f64 + 0.5) * h;
            for i in e..=e + 1 {
                for j in e..=e + 1 {
                    let (pi, di) = hat_in(nodes, i, e, y);
                    let (pj, dj) = hat_in(nodes, j, e, y);
                    m[i][j] += h * pj * pi;
                    s[i][j] += h * dj * di;
                    c[i][j] += h * y * dj * pi;
                }
            }
        }
    }
    (m, s, c)
}

/// Hat function `i` and its slope, restricted to element `e`.
pub fn hat_in(nodes: &[f64], i: usize, e: usize, y: f64) -> (f64, f64) {
    let k = nodes[e + 1] - nodes[e];
    if i == e {
        ((nodes[e + 1] - y) / k, -1.0 / k)
    } else {
        ((y - nodes[e]) / k, 1.0 / k)
    }
}

/// Exact element integrals, written out by hand.
pub fn closed_form_matrices(nodes: &[f64]) -> (Dense, Dense, Dense) {
    let n = nodes.len();
    let mut m = vec![vec![0.0; n]; n];
    let mut s = m.clone();
    let mut c = m.clone();
    for e in 0..n - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let k = b - a;
        let (l, r) = (e, e + 1);
        m[l][l] += k / 3.0;
        m[r][r] += k / 3.0;
        m[l][r] += k / 6.0;
        m[r][l] += k / 6.0;
        s[l][l] += 1.0 / k;
        s[r][r] += 1.0 / k;
        s[l][r] -= 1.0 / k;
        s[r][l] -= 1.0 / k;
        let ya = (2.0 * a + b) / 6.0;
        let yb = (a + 2.0 * b) / 6.0;
        c[l][l] -= ya;
        c[l][r] += ya;
        c[r][l] -= yb;
        c[r][r] += yb;
    }
    (m, s, c)
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let pivot_row = a[col].clone();
                for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn max_diff(a: &Dense, t: &TridiagonalMatrix) -> f64 {
    let d = t.to_dense();
    a.iter()
        .zip(&d)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// One step written out densely from the closed-form matrices.
pub fn dense_step(
    nodes: &[f64],
    d: &DimensionlessParameters,
    u: &[f64],
    w: f64,
    tau: f64,
    dt: f64,
) -> (Vec<f64>, f64) {
    let n = nodes.len();
    let (m, s, c) = closed_form_matrices(nodes);
    let dw = d.a0 * (u[n - 1] - d.eval_sigma(w).unwrap());
    let w1 = w + dt * dw;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = m[i][j] / dt - dw / w1 * c[i][j] + s[i][j] / (w1 * w1);
        }
    }
    let mut rhs: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| m[i][j] * u[j]).sum::<f64>() / dt)
        .collect();
    rhs[0] += d.biot / w1 * (d.eval_b(tau).unwrap() - d.henry * u[0]);
    rhs[n - 1] -= dw / w1 * u[n - 1];
    (dense_solve(a, rhs), w1)
}

/// Strictly diagonally dominant tridiagonal matrix with random signs, and
/// a random right-hand side.
pub fn random_dominant_system(rng: &mut StdRng, n: usize) -> (TridiagonalMatrix, Vec<f64>) {
    let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i: usize| {
            let off = lower.get(i.wrapping_sub(1)).map_or(0.0, |v| v.abs())
                + upper.get(i).map_or(0.0, |v| v.abs());
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * (off + rng.gen_range(0.1..2.0))
        })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    (TridiagonalMatrix::new(lower, diag, upper).unwrap(), rhs)
}
