//! File writers: CSV at 17 significant digits, JSON reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use geophase::evolution::Trajectory;
use geophase::state::{bloch_from_state, Operator};
use geophase::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::Failure;

/// Shortest form that still carries 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Serialize)]
pub struct ReportDocument<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub warnings: &'a [String],
    pub results: T,
}

/// Real and imaginary parts, row major.
#[derive(Serialize)]
pub struct MatrixDoc {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&Operator> for MatrixDoc {
    fn from(op: &Operator) -> Self {
        let n = op.dim();
        let rows = |f: fn(Complex64) -> f64| (0..n).map(|r| (0..n).map(|c| f(op.get(r, c))).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }
}

pub fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create output directory {}: {e}", dir.display())))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, doc: &T) -> Result<PathBuf, Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Failure::contract(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(dir, name, &text)
}

/// `t`, real/imaginary amplitude columns, and the Bloch vector of each
/// qubit.
pub fn trajectory_csv(traj: &Trajectory) -> Result<String, Failure> {
    let dim = traj.initial().dim();
    let labels: Vec<&str> = match dim {
        2 => vec!["up", "down"],
        _ => vec!["upup", "updown", "downup", "downdown"],
    };
    let mut out = String::from("t");
    for l in &labels {
        write!(out, ",re_{l},im_{l}").unwrap();
    }
    let qubits = if dim == 2 { 1 } else { 2 };
    for q in 1..=qubits {
        write!(out, ",bloch_x{q},bloch_y{q},bloch_z{q}").unwrap();
    }
    out.push('\n');
    for s in traj.samples() {
        out.push_str(&fmt_f64(s.t));
        for a in s.state.amplitudes() {
            write!(out, ",{},{}", fmt_f64(a.re), fmt_f64(a.im)).unwrap();
        }
        let blochs = if dim == 2 {
            vec![bloch_from_state(&s.state)?]
        } else {
            vec![s.state.reduced_bloch(0)?, s.state.reduced_bloch(1)?]
        };
        for b in blochs {
            write!(out, ",{},{},{}", fmt_f64(b.x), fmt_f64(b.y), fmt_f64(b.z)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Header plus rows of pre-formatted fields.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
