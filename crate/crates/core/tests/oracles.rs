//! Independent reimplementations checked against the library: closed-form
//! element integrals, brute-force quadrature, dense elimination.

mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use common::{
    closed_form_matrices, dense_solve, dense_step, max_diff, midpoint_matrices,
    random_dominant_system, random_mesh,
};
use front_fem::assembly::assemble;
use front_fem::linalg::{thomas_solve, TridiagonalSystem};
use front_fem::mesh::{Mesh1D, P1Function};
use front_fem::model::{
    nondimensionalize, Coefficient, DimensionlessParameters, PhysicalParameters,
};
use front_fem::stepper::{step, DiscreteState};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn element_matrices_match_midpoint_quadrature() {
    let mut rng = StdRng::seed_from_u64(7);
    for trial in 0..40 {
        let n = rng.gen_range(2..=8);
        let mesh = random_mesh(&mut rng, n);
        let mats = assemble(&mesh);
        let (m, s, c) = midpoint_matrices(mesh.nodes(), 10_000);
        for (name, dense, tri) in [
            ("mass", &m, &mats.mass),
            ("stiffness", &s, &mats.stiffness),
            ("convection", &c, &mats.convection),
        ] {
            let err = max_diff(dense, tri);
            assert!(
                err < 1e-6,
                "trial {trial}: {name} off by {err} on {:?}",
                mesh.nodes()
            );
        }
    }
}

#[test]
fn element_matrices_match_closed_form() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..40 {
        let n = rng.gen_range(2..=8);
        let mesh = random_mesh(&mut rng, n);
        let mats = assemble(&mesh);
        let (m, s, c) = closed_form_matrices(mesh.nodes());
        assert!(max_diff(&m, &mats.mass) < 1e-13);
        assert!(max_diff(&s, &mats.stiffness) < 1e-9);
        assert!(max_diff(&c, &mats.convection) < 1e-13);
    }
}

#[test]
fn thomas_matches_dense_elimination() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in [1, 2, 3, 10, 57, 200] {
        for _ in 0..5 {
            let (m, rhs) = random_dominant_system(&mut rng, n);
            let expect = dense_solve(m.to_dense(), rhs.clone());
            let got = thomas_solve(&TridiagonalSystem::new(m, rhs).unwrap()).unwrap();
            let scale = expect
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()))
                .max(1e-300);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() / scale < 1e-10, "n = {n}: {g} vs {e}");
            }
        }
    }
}

#[test]
fn one_step_matches_dense_assembly() {
    let mut rng = StdRng::seed_from_u64(3);
    let d = DimensionlessParameters::direct(
        2.5,
        1.7,
        1.8,
        Coefficient::Linear(30.0),
        Coefficient::Linear(0.2),
        Coefficient::Constant(0.5),
        1.0,
        50.0,
    );
    for n in [2, 5] {
        for trial in 0..10 {
            let mesh = Arc::new(if trial == 0 {
                Mesh1D::uniform(n).unwrap()
            } else {
                random_mesh(&mut rng, n)
            });
            let n_act = mesh.n_nodes();
            let u: Vec<f64> = (0..n_act).map(|_| rng.gen_range(0.1..1.5)).collect();
            let w = rng.gen_range(1.0..2.0);
            let dt = rng.gen_range(0.001..0.05);
            let tau = 4.0 * dt;
            let state = DiscreteState {
                step_index: 4,
                tau,
                u: P1Function::new(Arc::clone(&mesh), u.clone()).unwrap(),
                w,
            };
            let next = step(&state, &assemble(&mesh), &d, dt).unwrap();
            let (expect_u, expect_w) = dense_step(mesh.nodes(), &d, &u, w, tau, dt);
            assert_relative_eq!(next.w, expect_w, max_relative = 1e-12);
            assert_eq!(next.step_index, 5);
            assert_relative_eq!(next.tau, 5.0 * dt, max_relative = 1e-15);
            for (g, e) in next.u.coeffs().iter().zip(&expect_u) {
                assert!(
                    (g - e).abs() <= 1e-12 * e.abs().max(1.0),
                    "N = {n}: {g} vs {e}"
                );
            }
        }
    }
}

/// The same experiment in micrometres, seconds and milligrams.
#[test]
fn dimensionless_groups_do_not_depend_on_units() {
    let p = PhysicalParameters::rubber_experiment();
    let (lf, tf, mf) = (1e3, 60.0, 1e3);
    let conc = mf / (lf * lf * lf);
    let q = PhysicalParameters {
        diffusivity: p.diffusivity * lf * lf / tf,
        beta: p.beta * lf / tf,
        henry: p.henry,
        a0: p.a0 * lf.powi(4) / (mf * tf),
        s0: p.s0 * lf,
        m0: p.m0 * conc,
        l_max: p.l_max * lf,
        t_final: p.t_final * tf,
        b: Coefficient::Constant(1.0 * conc),
        sigma: Coefficient::Linear(0.1 * conc / lf),
        sigma_plateau: None,
    };
    let a = nondimensionalize(&p, &Coefficient::Constant(p.m0)).unwrap();
    let b = nondimensionalize(&q, &Coefficient::Constant(q.m0)).unwrap();
    assert_relative_eq!(a.biot, b.biot, max_relative = 1e-12);
    assert_relative_eq!(a.a0, b.a0, max_relative = 1e-12);
    assert_relative_eq!(a.t_final, b.t_final, max_relative = 1e-12);
    assert_relative_eq!(a.h_max, b.h_max, max_relative = 1e-12);
    for x in [0.0, 0.3, 1.0, 7.5, 36.6] {
        assert_relative_eq!(
            a.eval_b(x).unwrap(),
            b.eval_b(x).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            a.eval_sigma(x).unwrap(),
            b.eval_sigma(x).unwrap(),
            max_relative = 1e-12
        );
    }
    assert_relative_eq!(a.eval_u0(0.5), b.eval_u0(0.5), max_relative = 1e-12);
}

#[test]
fn experiment_first_step() {
    let p = PhysicalParameters::rubber_experiment();
    let d = nondimensionalize(&p, &Coefficient::Constant(p.m0)).unwrap();
    assert_relative_eq!(d.biot, 0.564 * 0.01 / 3.66e-4, max_relative = 1e-14);
    assert_relative_eq!(d.a0, 50.0 * 0.1 * 0.01 / 3.66e-4, max_relative = 1e-14);
    assert!((d.biot - 15.40984).abs() < 5e-6);
    assert!((d.a0 - 136.61202).abs() < 5e-6);
    assert_relative_eq!(d.t_final, 36.6, max_relative = 1e-14);
    assert_relative_eq!(d.eval_b(0.0).unwrap(), 10.0, max_relative = 1e-14);
    assert_relative_eq!(d.eval_sigma(1.0).unwrap(), 0.01, max_relative = 1e-14);

    let mesh = Arc::new(Mesh1D::uniform(11).unwrap());
    let s0 = DiscreteState::initial(&d, &mesh).unwrap();
    assert!(s0.u.coeffs().iter().all(|&v| v == 1.0));
    let dt = 1e-5;
    let s1 = step(&s0, &assemble(&mesh), &d, dt).unwrap();
    assert_relative_eq!(s1.w, 1.0 + dt * d.a0 * 0.99, max_relative = 1e-14);
    let (u, w) = dense_step(mesh.nodes(), &d, s0.u.coeffs(), 1.0, 0.0, dt);
    assert_relative_eq!(s1.w, w, max_relative = 1e-14);
    for (g, e) in s1.u.coeffs().iter().zip(&u) {
        assert!((g - e).abs() < 1e-12);
    }
    assert!(s1.u.at_left() > 1.0);
}
