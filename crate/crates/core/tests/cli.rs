//! The `front-fem` binary: exit codes and files on disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use front_fem::cli::output::read_trajectory;
use front_fem::cli::parse_config;
use front_fem::model::{nondimensionalize, Coefficient, PhysicalParameters};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_front-fem");

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn experiment_text() -> String {
    fs::read_to_string(config_dir().join("paper_sec5.cfg")).unwrap()
}

/// Rewrites `key = ...` lines, appending keys that are absent.
fn with(text: &str, changes: &[(&str, &str)]) -> String {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    for (key, value) in changes {
        let prefix = format!("{key} =");
        match lines.iter_mut().find(|l| l.starts_with(&prefix)) {
            Some(l) => *l = format!("{key} = {value}"),
            None => lines.push(format!("{key} = {value}")),
        }
    }
    lines.join("\n")
}

fn run_with(dir: &TempDir, text: &str, extra: &[&str]) -> Output {
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    Command::new(BIN)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn shipped_config_is_the_experiment() {
    let cfg = parse_config(&experiment_text()).unwrap();
    let expected = PhysicalParameters::rubber_experiment();
    let p = &cfg.physical;
    assert_eq!(
        (p.diffusivity, p.beta, p.henry, p.a0, p.s0, p.m0, p.t_final),
        (
            expected.diffusivity,
            expected.beta,
            expected.henry,
            expected.a0,
            expected.s0,
            expected.m0,
            expected.t_final
        )
    );
    assert_eq!(p.b, Coefficient::Constant(1.0));
    assert_eq!(p.sigma, Coefficient::Linear(0.1));
    let d = cfg.dimensionless().unwrap();
    let reference = nondimensionalize(&expected, &Coefficient::Constant(expected.m0)).unwrap();
    assert_eq!(d.biot, reference.biot);
    assert_eq!(d.a0, reference.a0);
    assert_eq!(d.t_final, reference.t_final);
}

#[test]
fn zero_coupling_simulation_stays_put() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(config_dir().join("zero_coupling.cfg")).unwrap();
    let o = run_with(&dir, &text, &["--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(
        o.stdout.is_empty(),
        "--quiet printed {:?}",
        String::from_utf8_lossy(&o.stdout)
    );

    let rows = read_trajectory(&dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        assert_eq!(row.w, 1.0);
        assert_eq!(row.s_phys, 1.0);
        assert_eq!(row.u.len(), 11);
        assert!(row.u.iter().all(|v| (v - 0.5).abs() < 1e-14), "{:?}", row.u);
    }
    let iface = fs::read_to_string(dir.path().join("out/interface.csv")).unwrap();
    assert_eq!(iface.lines().next(), Some("step,tau,W"));
    assert_eq!(iface.lines().count(), 12);
}

#[test]
fn trajectory_header_and_physical_time() {
    let dir = TempDir::new().unwrap();
    let text = with(
        &experiment_text(),
        &[
            ("n_nodes", "5"),
            ("dt", "1e-5"),
            ("T", "0.001"),
            ("record_every", "50"),
        ],
    );
    let o = run_with(&dir, &text, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let body = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(
        body.lines().next(),
        Some("step,tau,t_phys,W,s_phys,U_0,U_1,U_2,U_3,U_4")
    );
    let rows = read_trajectory(&dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(
        rows.iter().map(|r| r.step).collect::<Vec<_>>(),
        vec![0, 50, 100]
    );
    let last = rows.last().unwrap();
    // t = s0^2 tau / D and s = s0 W.
    assert!((last.t_phys - 1e-4 * last.tau / 3.66e-4).abs() < 1e-15);
    assert!((last.s_phys - 0.01 * last.w).abs() < 1e-15);
    assert!(last.w > 1.0);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let o = run_with(&dir, "", &[]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    for key in ["D", "beta", "H", "a0", "s0", "m0", "Tf", "b", "sigma"] {
        assert!(err.contains(key), "{key} not listed in {err}");
    }

    assert_eq!(
        code(&run_with(
            &dir,
            &with(&experiment_text(), &[("dt", "-0.1")]),
            &[]
        )),
        2
    );
    assert_eq!(
        code(&run_with(
            &dir,
            &with(&experiment_text(), &[("colour", "1")]),
            &[]
        )),
        2
    );
    assert_eq!(
        code(&run_with(
            &dir,
            &with(&experiment_text(), &[("D", "0")]),
            &[]
        )),
        2
    );
    // A step that does not divide the final time.
    assert_eq!(
        code(&run_with(
            &dir,
            &with(&experiment_text(), &[("dt", "0.7")]),
            &[]
        )),
        2
    );

    let bad_line = run_with(&dir, "D 3\n", &[]);
    assert_eq!(code(&bad_line), 2);
    assert!(String::from_utf8_lossy(&bad_line.stderr).contains("line 1"));
}

#[test]
fn bad_mode_flag_is_rejected_by_the_parser() {
    let dir = TempDir::new().unwrap();
    let o = run_with(&dir, &experiment_text(), &["--mode", "sprint"]);
    assert_ne!(code(&o), 0);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = Command::new(BIN)
        .args(["--config", "/nonexistent/x.cfg"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn breakdown_exits_with_3_and_keeps_partial_output() {
    let dir = TempDir::new().unwrap();
    let text = with(
        &experiment_text(),
        &[("n_nodes", "40"), ("dt", "1e-2"), ("record_every", "1")],
    );
    let o = run_with(&dir, &text, &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stability breakdown"));
    let out = dir.path().join("out");
    assert!(!out.join("trajectory.csv").exists());
    let rows = read_trajectory(&out.join("trajectory.csv.partial")).unwrap();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|r| r.u.iter().all(|v| v.is_finite()) && r.w > 0.0));
    assert!(out.join("interface.csv.partial").exists());
}

#[test]
fn invariant_violation_exits_with_4() {
    let dir = TempDir::new().unwrap();
    let text = with(
        &experiment_text(),
        &[("n_nodes", "40"), ("dt", "2e-4"), ("T", "0.2")],
    );
    let o = run_with(&dir, &text, &["--mode", "check-invariants"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("FAIL  bounds"), "{err}");
}

#[test]
fn check_passes_on_a_resolved_short_run() {
    let dir = TempDir::new().unwrap();
    let text = with(
        &experiment_text(),
        &[("n_nodes", "40"), ("dt", "1e-5"), ("T", "0.1")],
    );
    let o = run_with(&dir, &text, &["--mode", "check"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(
        code(&o),
        0,
        "{stdout}{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for name in [
        "assumptions",
        "fixed-point",
        "determinism",
        "monotonicity",
        "bounds",
        "energy-band",
    ] {
        assert!(
            stdout.contains(&format!("PASS  {name}")),
            "{name}: {stdout}"
        );
    }
}

#[test]
fn convergence_writes_the_table_columns() {
    let dir = TempDir::new().unwrap();
    let text = with(
        &experiment_text(),
        &[
            ("T", "0.05"),
            ("space_dt", "1e-5"),
            ("space_base_nodes", "5"),
            ("space_levels", "3"),
            ("space_reference_nodes", "40"),
        ],
    );
    let o = run_with(&dir, &text, &["--mode", "convergence-space", "--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let table = fs::read_to_string(out.join("table_space.csv")).unwrap();
    let lines: Vec<_> = table.lines().collect();
    assert_eq!(lines[0], "resolution,err_u,order_u,err_w,order_w");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("5,"));
    assert!(lines[3].starts_with("20,") && lines[3].ends_with(','));
    assert!(out.join("plot_space.gp").exists());

    let text = with(
        &experiment_text(),
        &[
            ("T", "0.01"),
            ("time_nodes", "11"),
            ("time_base_dt", "1e-4"),
            ("time_levels", "3"),
            ("time_reference_divisor", "8"),
        ],
    );
    let o = run_with(&dir, &text, &["--mode", "convergence-time", "--quiet"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("table_time.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}
