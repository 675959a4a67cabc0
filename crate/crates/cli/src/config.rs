//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Numbers accept plain floats
//! and multiples of pi written as `pi`, `pi/8`, `3*pi/4` or `-pi/2`.
//! Lists are comma separated.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `e_j0` | 1 | single-junction Josephson energy |
//! | `e_ch` | 50 | charging energy |
//! | `delta_coupling` | 1 | capacitive coupling between boxes |
//! | `delta` | 0.04 | single-qubit offset-charge step |
//! | `step3_mode` | symmetric | `symmetric` or `literal` second leg |
//! | `theta` | pi/8 | two-qubit frame angle |
//! | `rotation_mode` | instantaneous | `instantaneous` or `finite` |
//! | `compensation` | derived | `derived` or `paper_literal` |
//! | `alpha_re`, `alpha_im` | 0, 0 | initial amplitude on `|up>` (no pair) |
//! | `beta_re`, `beta_im` | 1, 0 | initial amplitude on `|down>` (one pair) |
//! | `target_gamma` | pi/2 | calibration target |
//! | `samples` | 1001 | samples per segment |
//! | `method` | closed | `closed` or `rk4` |
//! | `out` | `.` | output directory |
//! | `sweep_kind` | delta | `delta` or `theta` |
//! | `sweep_values` | none | explicit grid, overrides start/stop/points |
//! | `sweep_start`, `sweep_stop`, `sweep_points` | 0, 0.2, 21 | linear grid |
//! | `n_min`, `n_max` | -2, 3 | charge window for `validate` |
//! | `ratios` | 0.2,0.1,0.05,0.025 | `e_j0/e_ch` values for `validate` |
//! | `execution` | parallel | `parallel` or `sequential` grid evaluation |

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

use geophase::device::DeviceParams;
use geophase::evolution::Method;
use geophase::protocol::single::Step3Mode;
use geophase::protocol::two_qubit::{CompensationMode, RotationMode};
use geophase::protocol::validate::{ChargeWindow, VALIDITY_RATIOS};
use geophase::{Execution, DEFAULT_SAMPLES_PER_SEGMENT};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Delta,
    Theta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub e_j0: f64,
    pub e_ch: f64,
    pub delta_coupling: f64,
    pub delta: f64,
    pub step3_mode: Step3Mode,
    pub theta: f64,
    pub rotation_mode: RotationMode,
    pub compensation: CompensationMode,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub target_gamma: f64,
    pub samples: usize,
    pub method: Method,
    pub out: PathBuf,
    pub sweep_kind: SweepKind,
    pub sweep_values: Option<Vec<f64>>,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    pub n_min: i32,
    pub n_max: i32,
    pub ratios: Vec<f64>,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        let device = DeviceParams::default();
        Self {
            e_j0: device.e_j0,
            e_ch: device.e_ch,
            delta_coupling: device.delta_coupling,
            delta: 0.04,
            step3_mode: Step3Mode::Symmetric,
            theta: PI / 8.0,
            rotation_mode: RotationMode::Instantaneous,
            compensation: CompensationMode::Derived,
            alpha_re: 0.0,
            alpha_im: 0.0,
            beta_re: 1.0,
            beta_im: 0.0,
            target_gamma: PI / 2.0,
            samples: DEFAULT_SAMPLES_PER_SEGMENT,
            method: Method::ClosedForm,
            out: PathBuf::from("."),
            sweep_kind: SweepKind::Delta,
            sweep_values: None,
            sweep_start: 0.0,
            sweep_stop: 0.2,
            sweep_points: 21,
            n_min: ChargeWindow::default().n_min,
            n_max: ChargeWindow::default().n_max,
            ratios: VALIDITY_RATIOS.to_vec(),
            execution: Execution::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", lineno + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
            }
            cfg.set(key, value.trim()).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "e_j0" => self.e_j0 = number(value)?,
            "e_ch" => self.e_ch = number(value)?,
            "delta_coupling" => self.delta_coupling = number(value)?,
            "delta" => self.delta = number(value)?,
            "step3_mode" => self.step3_mode = value.parse().map_err(|e| format!("{e}"))?,
            "theta" => self.theta = number(value)?,
            "rotation_mode" => self.rotation_mode = value.parse().map_err(|e| format!("{e}"))?,
            "compensation" => self.compensation = value.parse().map_err(|e| format!("{e}"))?,
            "alpha_re" => self.alpha_re = number(value)?,
            "alpha_im" => self.alpha_im = number(value)?,
            "beta_re" => self.beta_re = number(value)?,
            "beta_im" => self.beta_im = number(value)?,
            "target_gamma" => self.target_gamma = number(value)?,
            "samples" => self.samples = integer(value)?,
            "method" => self.method = value.parse().map_err(|e| format!("{e}"))?,
            "out" => self.out = PathBuf::from(value),
            "sweep_kind" => {
                self.sweep_kind = match value {
                    "delta" => SweepKind::Delta,
                    "theta" => SweepKind::Theta,
                    other => return Err(format!("unknown sweep kind '{other}'")),
                }
            }
            "sweep_values" => self.sweep_values = Some(list(value)?),
            "sweep_start" => self.sweep_start = number(value)?,
            "sweep_stop" => self.sweep_stop = number(value)?,
            "sweep_points" => self.sweep_points = integer(value)?,
            "n_min" => self.n_min = value.parse().map_err(|_| format!("'{value}' is not an integer"))?,
            "n_max" => self.n_max = value.parse().map_err(|_| format!("'{value}' is not an integer"))?,
            "ratios" => self.ratios = list(value)?,
            "execution" => {
                self.execution = match value {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    other => return Err(format!("unknown execution '{other}'")),
                }
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Routes a mode name to whichever mode setting accepts it.
    pub fn set_mode(&mut self, value: &str) -> Result<(), String> {
        if let Ok(m) = value.parse() {
            self.step3_mode = m;
        } else if let Ok(m) = value.parse() {
            self.rotation_mode = m;
        } else if let Ok(m) = value.parse() {
            self.compensation = m;
        } else {
            return Err(format!(
                "unknown mode '{value}' (expected symmetric, literal, instantaneous, finite, derived or paper_literal)"
            ));
        }
        Ok(())
    }

    pub fn device(&self) -> Result<DeviceParams, String> {
        DeviceParams::new(self.e_j0, self.e_ch, self.delta_coupling).map_err(|e| e.to_string())
    }

    pub fn window(&self) -> Result<ChargeWindow, String> {
        ChargeWindow::new(self.n_min, self.n_max).map_err(|e| e.to_string())
    }

    /// Grid for `sweep`, from `sweep_values` or the linear range.
    pub fn sweep_grid(&self) -> Vec<f64> {
        if let Some(v) = &self.sweep_values {
            return v.clone();
        }
        match self.sweep_points {
            0 => Vec::new(),
            1 => vec![self.sweep_start],
            n => (0..n)
                .map(|k| self.sweep_start + (self.sweep_stop - self.sweep_start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Float, or a multiple of pi: `pi`, `-pi/2`, `3*pi/4`, `0.5*pi`.
pub fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("'{s}' is not a number");
    let value = if let Ok(v) = s.parse::<f64>() {
        v
    } else if let Some(pos) = s.find("pi") {
        let (head, tail) = (s[..pos].trim(), s[pos + 2..].trim());
        let coefficient = match head.strip_suffix('*').map(str::trim).unwrap_or(head) {
            "" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match tail {
            "" => 1.0,
            t => t.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
        };
        coefficient * PI / divisor
    } else {
        return Err(bad());
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn integer(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_pi_multiples() {
        assert_eq!(number("0.25").unwrap(), 0.25);
        assert_eq!(number("pi").unwrap(), PI);
        assert_eq!(number("pi/8").unwrap(), PI / 8.0);
        assert_eq!(number("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(number("-pi/2").unwrap(), -PI / 2.0);
        assert!(number("pie").is_err());
        assert!(number("inf").is_err());
    }

    #[test]
    fn parse_overrides_defaults() {
        let cfg = RunConfig::parse("# device\ne_ch = 40\n\ntheta = pi/16  # comment\nmethod = rk4\nratios = 0.1, 0.05\n").unwrap();
        assert_eq!(cfg.e_ch, 40.0);
        assert_eq!(cfg.e_j0, 1.0);
        assert_eq!(cfg.theta, PI / 16.0);
        assert_eq!(cfg.method, Method::Rk4);
        assert_eq!(cfg.ratios, vec![0.1, 0.05]);
    }

    #[test]
    fn parse_rejects_unknown_and_duplicate_keys() {
        assert!(RunConfig::parse("foo = 1").unwrap_err().contains("unknown key"));
        assert!(RunConfig::parse("delta = 1\ndelta = 2").unwrap_err().contains("duplicate"));
        assert!(RunConfig::parse("delta 1").is_err());
    }

    #[test]
    fn mode_routing() {
        let mut cfg = RunConfig::default();
        cfg.set_mode("literal").unwrap();
        cfg.set_mode("finite").unwrap();
        cfg.set_mode("paper_literal").unwrap();
        assert_eq!(cfg.step3_mode, Step3Mode::Literal);
        assert_eq!(cfg.rotation_mode, RotationMode::Finite);
        assert_eq!(cfg.compensation, CompensationMode::PaperLiteral);
        assert!(cfg.set_mode("sideways").is_err());
    }

    #[test]
    fn sweep_grids() {
        let mut cfg = RunConfig { sweep_start: 0.0, sweep_stop: 1.0, sweep_points: 5, ..RunConfig::default() };
        assert_eq!(cfg.sweep_grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        cfg.sweep_points = 0;
        assert!(cfg.sweep_grid().is_empty());
        cfg.sweep_values = Some(vec![0.3]);
        assert_eq!(cfg.sweep_grid(), vec![0.3]);
    }
}
