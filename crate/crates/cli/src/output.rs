//! CSV and SVG artifacts of a simulation run.

use std::fs;
use std::path::{Path, PathBuf};

use cascade_core::sim::{self, ClosedLoopSystem, Trajectory};

use crate::svg::{self, Series};
use crate::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Shortest round-trip decimal form; independent of locale.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn write_csv(
    path: &Path,
    header: &[String],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().map(num))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// Writes norms, controls and per-component fields with their charts;
/// returns the paths written.
pub fn write_run(
    dir: &Path,
    sys: &ClosedLoopSystem,
    traj: &Trajectory,
    x_points: usize,
) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let m = sys.layout.m;
    let mut written = Vec::new();

    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("z{i}")));
    header.push("z".into());
    let path = dir.join("norms.csv");
    write_csv(
        &path,
        &header,
        traj.times.iter().zip(&traj.norms).map(|(t, n)| {
            let mut row = vec![*t];
            row.extend(n);
            row
        }),
    )?;
    written.push(path);

    let n_ctrl = traj
        .controls
        .first()
        .map_or(0, |c| c.len().saturating_sub(1));
    let mut header = vec!["t".to_string()];
    header.extend((1..=n_ctrl).map(|j| format!("u{j}")));
    header.push("sum_u".into());
    let path = dir.join("controls.csv");
    write_csv(
        &path,
        &header,
        traj.times.iter().zip(&traj.controls).map(|(t, c)| {
            let mut row = vec![*t];
            row.extend(c);
            row
        }),
    )?;
    written.push(path);

    let columns: Vec<Vec<f64>> = (0..=m)
        .map(|i| traj.norms.iter().map(|n| n[i]).collect())
        .collect();
    let series: Vec<Series<'_>> = columns
        .iter()
        .enumerate()
        .map(|(i, y)| Series {
            label: if i < m {
                format!("||z{}||", i + 1)
            } else {
                "||z||".into()
            },
            y,
        })
        .collect();
    let path = dir.join("norms.svg");
    write_text(
        &path,
        &svg::line_chart("L2 norms", "t", "norm", &traj.times, &series),
    )?;
    written.push(path);

    let ucols: Vec<Vec<f64>> = (0..=n_ctrl)
        .map(|j| traj.controls.iter().map(|c| c[j]).collect())
        .collect();
    let series: Vec<Series<'_>> = ucols
        .iter()
        .enumerate()
        .map(|(j, y)| Series {
            label: if j < n_ctrl {
                format!("u{}", j + 1)
            } else {
                "sum u".into()
            },
            y,
        })
        .collect();
    let path = dir.join("controls.svg");
    write_text(
        &path,
        &svg::line_chart("Controls", "t", "u", &traj.times, &series),
    )?;
    written.push(path);

    for i in 0..m {
        let field = sim::reconstruct(sys, traj, i, x_points)?;
        let mut header = vec!["t".to_string()];
        header.extend(field.x.iter().map(|x| format!("x={}", num(*x))));
        let path = dir.join(format!("field_{}.csv", i + 1));
        write_csv(
            &path,
            &header,
            field.t.iter().zip(&field.values).map(|(t, row)| {
                let mut r = vec![*t];
                r.extend(row);
                r
            }),
        )?;
        written.push(path);
        let path = dir.join(format!("field_{}.svg", i + 1));
        write_text(
            &path,
            &svg::heatmap(
                &format!("z{}(t, x)", i + 1),
                &field.t,
                &field.x,
                &field.values,
            ),
        )?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    write_text(path, &(text + "\n"))
}

pub fn write_report(path: &Path, text: &str) -> Result<(), CliError> {
    write_text(path, text)
}
