//! CSV emission and plain-text tables.
//!
//! Full-precision values are written with 17 significant digits so a
//! re-parse recovers the exact `f64`.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::model::{PublishedSummary, COMPARTMENTS};
use crate::numerics::{StateVector, TimeGrid, Trajectory};
use crate::studies::{ConvergenceRow, EraSummaryRow};

pub const CONVERGENCE_HEADER: &str = "k,y_norm,Y_norm,E_norm,rate";
pub const TRAJECTORY_HEADER: &str = "t,y1,y2,y3,y4,y5";

/// 17-significant-digit scientific notation.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        let rate = r.rate.map(full_precision).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            full_precision(r.k),
            full_precision(r.exact_norm),
            full_precision(r.numeric_norm),
            full_precision(r.error_norm),
            rate
        )?;
    }
    w.flush()
}

/// Writes grid points `0, every, 2 every, ...` and always the last one.
pub fn write_states_csv<W: Write>(
    grid: &TimeGrid,
    states: &[StateVector],
    every: usize,
    mut w: W,
) -> io::Result<()> {
    let every = every.max(1);
    let dim = states.first().map_or(COMPARTMENTS, |s| s.dim());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=dim).map(|i| format!("y{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    let last = states.len().saturating_sub(1);
    for (n, state) in states.iter().enumerate() {
        if n % every != 0 && n != last {
            continue;
        }
        let mut line = full_precision(grid.time(n));
        for v in state.iter() {
            line.push(',');
            line.push_str(&full_precision(*v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, every: usize, w: W) -> io::Result<()> {
    write_states_csv(&traj.grid, &traj.states, every, w)
}

/// Parses a trajectory CSV back into `(t, state)` rows.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<(f64, StateVector)>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::usage("trajectory CSV is empty"))?;
    let columns = header.split(',').count();
    if columns < 2 || !header.starts_with("t,") {
        return Err(Error::usage(format!(
            "unexpected trajectory header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::usage(format!("line {}: {e}", idx + 1)))?;
        if values.len() != columns {
            return Err(Error::usage(format!(
                "line {}: expected {columns} fields, got {}",
                idx + 1,
                values.len()
            )));
        }
        let state = StateVector::new(values[1..].to_vec())
            .map_err(|e| Error::usage(format!("line {}: {e}", idx + 1)))?;
        rows.push((values[0], state));
    }
    Ok(rows)
}

/// Column label for the era `[a, b)`.
pub fn era_label(a: f64, b: f64) -> String {
    format!("{a}-{b}")
}

/// `compartment,<era1>,...,<eraE>,average,rate_percent`; averages at full
/// precision, shares rounded to one decimal.
pub fn write_summary_csv<W: Write>(
    rows: &[EraSummaryRow],
    boundaries: &[f64],
    mut w: W,
) -> io::Result<()> {
    let mut header = vec!["compartment".to_string()];
    header.extend(boundaries.windows(2).map(|b| era_label(b[0], b[1])));
    header.push("average".into());
    header.push("rate_percent".into());
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let mut line = r.compartment.to_string();
        for a in &r.era_averages {
            line.push(',');
            line.push_str(&full_precision(*a));
        }
        let _ = write!(
            line,
            ",{},{:.1}",
            full_precision(r.overall_average),
            r.display_share()
        );
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn format_convergence_table(rows: &[ConvergenceRow]) -> String {
    let mut out = format!(
        "{:>12} {:>12} {:>12} {:>12} {:>8}\n",
        "k", "|||y|||", "|||Y|||", "|||E|||", "R(2k/k)"
    );
    for r in rows {
        let rate = r
            .rate
            .map_or_else(|| "--".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            out,
            "{:>12} {:>12.4e} {:>12.4e} {:>12.4e} {:>8}",
            format!("2^{}", -(r.k.log2().round() as i64)).replace("2^", "2^-"),
            r.exact_norm,
            r.numeric_norm,
            r.error_norm,
            rate
        );
    }
    out
}

/// Era table in the published layout, optionally followed by the published
/// values for comparison.
pub fn format_summary_table(
    rows: &[EraSummaryRow],
    boundaries: &[f64],
    published: Option<&PublishedSummary>,
) -> String {
    let eras: Vec<String> = boundaries
        .windows(2)
        .map(|b| format!("[{},{}[", b[0], b[1]))
        .collect();
    let mut out = String::new();
    let header = |out: &mut String| {
        let _ = write!(out, "{:<8}", "people");
        for e in &eras {
            let _ = write!(out, " {e:>12}");
        }
        let _ = writeln!(out, " {:>12} {:>7}", "average", "rate");
    };
    header(&mut out);
    for r in rows {
        let _ = write!(out, "{:<8}", r.compartment);
        for a in &r.era_averages {
            let _ = write!(out, " {:>12.4e}", a);
        }
        let _ = writeln!(
            out,
            " {:>12.4e} {:>6.1}%",
            r.overall_average,
            r.display_share()
        );
    }
    if let Some(p) = published {
        let _ = writeln!(out, "published values:");
        header(&mut out);
        for i in 0..COMPARTMENTS {
            let _ = write!(out, "{:<8}", format!("y{}", i + 1));
            for a in p.era_averages[i] {
                let _ = write!(out, " {:>12.4e}", a);
            }
            let _ = writeln!(
                out,
                " {:>12.4e} {:>6.1}%",
                p.overall_average[i], p.share_percent[i]
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn convergence_csv_leaves_first_rate_empty() {
        let rows = vec![
            ConvergenceRow {
                k: 0.0625,
                exact_norm: 0.18,
                numeric_norm: 0.17,
                error_norm: 7e-3,
                rate: None,
            },
            ConvergenceRow {
                k: 0.03125,
                exact_norm: 0.18,
                numeric_norm: 0.17,
                error_norm: 2e-3,
                rate: Some(1.8),
            },
        ];
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_HEADER);
        assert!(lines[1].ends_with(','));
        assert_eq!(
            lines[2].split(',').nth(4).unwrap().parse::<f64>().unwrap(),
            1.8
        );
        let table = format_convergence_table(&rows);
        assert!(table.contains("2^-4") && table.contains("2^-5") && table.contains("--"));
    }

    #[test]
    fn decimation_keeps_endpoints() {
        let grid = TimeGrid::with_steps(0.0, 1.0, 10).unwrap();
        let states: Vec<StateVector> = (0..=10)
            .map(|n| StateVector::new(vec![n as f64; 5]).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_states_csv(&grid, &states, 4, &mut buf).unwrap();
        let rows = read_trajectory_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        let kept: Vec<f64> = rows.iter().map(|(_, s)| s[0]).collect();
        assert_eq!(kept, vec![0.0, 4.0, 8.0, 10.0]);
        assert_eq!(rows.last().unwrap().0, 1.0);
    }

    #[test]
    fn summary_csv_shape() {
        let rows: Vec<EraSummaryRow> = (0..5)
            .map(|i| EraSummaryRow {
                compartment: crate::model::COMPARTMENT_LABELS[i],
                era_averages: vec![1.0e6; 4],
                overall_average: 1.0e6,
                share_percent: 6.25,
            })
            .collect();
        let mut buf = Vec::new();
        write_summary_csv(&rows, &[1986.0, 1990.0, 1994.0, 1998.0, 2002.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "compartment,1986-1990,1990-1994,1994-1998,1998-2002,average,rate_percent"
        );
        assert_eq!(lines.len(), 6);
        assert!(lines[1].ends_with(",6.3"));
    }

    #[test]
    fn read_rejects_ragged_rows() {
        assert!(read_trajectory_csv("").is_err());
        assert!(read_trajectory_csv("t,y1\n0,1,2\n").is_err());
        assert!(read_trajectory_csv("t,y1\n0,abc\n").is_err());
        assert!(read_trajectory_csv("x,y\n0,1\n").is_err());
    }

    proptest! {
        #[test]
        fn full_precision_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            prop_assert_eq!(full_precision(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
