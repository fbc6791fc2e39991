//! CSV files written by the command line front end.
//!
//! Floats use Rust's shortest round-trip formatting, so a value read back
//! parses to the identical `f64`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::analysis::{ConvergenceTable, Protocol};
use crate::model::PhysicalParameters;
use crate::stepper::{snapshot, Trajectory};

pub type CsvResult<T> = Result<T, csv::Error>;

/// `step, tau, t_phys, W, s_phys, U_0 .. U_{N-1}`, one row per recorded state.
pub fn write_trajectory(path: &Path, traj: &Trajectory, p: &PhysicalParameters) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    let n = traj.mesh.n_nodes();
    let mut header = vec![
        "step".to_string(),
        "tau".into(),
        "t_phys".into(),
        "W".into(),
        "s_phys".into(),
    ];
    header.extend((0..n).map(|i| format!("U_{i}")));
    w.write_record(&header)?;
    for st in &traj.states {
        let phys = snapshot(st, p);
        let mut row = vec![
            st.step_index.to_string(),
            st.tau.to_string(),
            phys.t.to_string(),
            st.w.to_string(),
            phys.s.to_string(),
        ];
        row.extend(st.u.coeffs().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `step, tau, W`.
pub fn write_interface(path: &Path, traj: &Trajectory) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "tau", "W"])?;
    for st in &traj.states {
        w.write_record([
            st.step_index.to_string(),
            st.tau.to_string(),
            st.w.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `resolution, err_u, order_u, err_w, order_w`; absent orders are empty.
pub fn write_table(path: &Path, table: &ConvergenceTable) -> CsvResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["resolution", "err_u", "order_u", "err_w", "order_w"])?;
    let opt = |o: Option<f64>| o.map(|v| v.to_string()).unwrap_or_default();
    for r in &table.rows {
        w.write_record([
            r.resolution.value().to_string(),
            r.err_u.to_string(),
            opt(r.order_u),
            r.err_w.to_string(),
            opt(r.order_w),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_file_name(protocol: Protocol) -> &'static str {
    match protocol {
        Protocol::Space => "table_space.csv",
        Protocol::Time => "table_time.csv",
    }
}

/// A gnuplot script drawing both error columns on log-log axes, with a
/// slope-one guide.
pub fn write_gnuplot_script(path: &Path, protocol: Protocol) -> std::io::Result<()> {
    let (csv_name, xlabel) = match protocol {
        Protocol::Space => (table_file_name(protocol), "N"),
        Protocol::Time => (table_file_name(protocol), "dt"),
    };
    let guide = match protocol {
        Protocol::Space => "1.0/x",
        Protocol::Time => "x",
    };
    let mut f = File::create(path)?;
    writeln!(f, "set datafile separator ','")?;
    writeln!(f, "set logscale xy")?;
    writeln!(f, "set key left top")?;
    writeln!(f, "set xlabel '{xlabel}'")?;
    writeln!(f, "set ylabel 'error'")?;
    writeln!(f, "set terminal pngcairo size 800,600")?;
    writeln!(f, "set output '{}.png'", csv_name.trim_end_matches(".csv"))?;
    writeln!(
        f,
        "plot '{csv_name}' every ::1 using 1:2 with linespoints title 'max ||U - u_ref||', \\\n     '{csv_name}' every ::1 using 1:4 with linespoints title 'max |W - W_ref|', \\\n     {guide} with lines dashtype 2 title 'slope 1'"
    )?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub step: usize,
    pub tau: f64,
    pub t_phys: f64,
    pub w: f64,
    pub s_phys: f64,
    pub u: Vec<f64>,
}

pub fn read_trajectory(path: &Path) -> CsvResult<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> CsvResult<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad_field(&rec, i))
        };
        let step = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad_field(&rec, 0))?;
        let u = (5..rec.len()).map(num).collect::<CsvResult<Vec<_>>>()?;
        rows.push(TrajectoryRow {
            step,
            tau: num(1)?,
            t_phys: num(2)?,
            w: num(3)?,
            s_phys: num(4)?,
            u,
        });
    }
    Ok(rows)
}

fn bad_field(rec: &csv::StringRecord, i: usize) -> csv::Error {
    let msg = format!(
        "unparsable field {i} in row {:?}",
        rec.position().map(|p| p.line())
    );
    csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, msg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ErrorRecord, Resolution};
    use crate::mesh::Mesh1D;
    use crate::model::{Coefficient, DimensionlessParameters, ScaledCoefficient};
    use crate::stepper::run;

    #[test]
    fn trajectory_round_trip_is_bitwise() {
        let mut d = DimensionlessParameters::zero_coupling(1.0, 0.3);
        d.biot = 1.3;
        d.a0 = 0.7;
        d.b_scaled = ScaledCoefficient::identity(Coefficient::Constant(2.0));
        d.sigma_scaled = ScaledCoefficient::identity(Coefficient::Linear(0.1));
        let traj = run(&d, &Mesh1D::uniform(7).unwrap(), 0.01, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trajectory.csv");
        let p = PhysicalParameters::rubber_experiment();
        write_trajectory(&path, &traj, &p).unwrap();
        let rows = read_trajectory(&path).unwrap();
        assert_eq!(rows.len(), traj.states.len());
        for (row, st) in rows.iter().zip(&traj.states) {
            assert_eq!(row.step, st.step_index);
            assert_eq!(row.tau.to_bits(), st.tau.to_bits());
            assert_eq!(row.w.to_bits(), st.w.to_bits());
            assert_eq!(row.u.len(), 7);
            for (a, b) in row.u.iter().zip(st.u.coeffs()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn table_leaves_missing_orders_blank() {
        let rec = |n, e| ErrorRecord {
            resolution: Resolution::Nodes(n),
            err_u: e,
            err_w: e,
        };
        let t = ConvergenceTable::from_records(
            Protocol::Space,
            String::new(),
            &[rec(20, 0.4), rec(40, 0.2)],
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_table(&path, &t).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "resolution,err_u,order_u,err_w,order_w");
        assert_eq!(lines[1], "20,0.4,1,0.4,1");
        assert_eq!(lines[2], "40,0.2,,0.2,");
    }
}
