//! Nodal interpolation of sin(pi y): the L2 error falls like k^2 and the
//! H1 seminorm error like k.

use std::f64::consts::PI;
use std::sync::Arc;

use front_fem::analysis::observed_order;
use front_fem::mesh::{interpolate, Mesh1D};

/// Errors by Gauss quadrature with 5 points per element.
fn errors(n: usize) -> (f64, f64) {
    let mesh = Arc::new(Mesh1D::uniform(n).unwrap());
    let g = interpolate(|y| (PI * y).sin(), &mesh).unwrap();
    let (gp, gw) = gauss5();
    let (mut l2, mut h1) = (0.0, 0.0);
    for (e, pair) in mesh.nodes().windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let k = b - a;
        let slope = (g.coeffs()[e + 1] - g.coeffs()[e]) / k;
        for (x, w) in gp.iter().zip(gw) {
            let y = a + 0.5 * k * (x + 1.0);
            let gy = g.coeffs()[e] + slope * (y - a);
            l2 += 0.5 * k * w * ((PI * y).sin() - gy).powi(2);
            h1 += 0.5 * k * w * (PI * (PI * y).cos() - slope).powi(2);
        }
    }
    (l2.sqrt(), h1.sqrt())
}

fn gauss5() -> ([f64; 5], [f64; 5]) {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
    ([-b, -a, 0.0, a, b], [wb, wa, 128.0 / 225.0, wa, wb])
}

fn main() {
    let meshes = [17, 33, 65, 129];
    let errs: Vec<_> = meshes.iter().map(|&n| errors(n)).collect();
    println!(
        "{:>5} {:>14} {:>8} {:>14} {:>8}",
        "N", "L2", "order", "H1-semi", "order"
    );
    for (i, (&n, &(l2, h1))) in meshes.iter().zip(&errs).enumerate() {
        let next = errs.get(i + 1);
        let ord = |f: fn(&(f64, f64)) -> f64| {
            next.map(|nx| format!("{:.3}", observed_order(f(&errs[i]), f(nx), 2.0).unwrap()))
                .unwrap_or_default()
        };
        println!(
            "{n:>5} {l2:>14.6e} {:>8} {h1:>14.6e} {:>8}",
            ord(|e| e.0),
            ord(|e| e.1)
        );
    }
}
