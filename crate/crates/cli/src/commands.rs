//! Subcommand bodies. Each returns the process exit code.

use geophase::device::DeviceParams;
use geophase::phase::CYCLICITY_TOLERANCE;
use geophase::protocol::single::{
    calibrate_delta, protocol_tau, run_single_qubit, EigenstatePhases, SingleQubitPlan, Step3Mode,
};
use geophase::protocol::sweep::{delta_sweep, theta_sweep, DeltaRow, DeltaSweep, ThetaRow};
use geophase::protocol::two_qubit::{run_conditional_gate_with, TwoQubitPlan};
use geophase::protocol::validate::{discrepancy_is_monotone, validity_sweep, ValidityPoint};
use geophase::state::StateVector;
use geophase::protocol::single::Calibration;
use geophase::Complex64;
use serde::Serialize;

use crate::config::{RunConfig, SweepKind};
use crate::output::{
    csv_table, fmt_f64, fmt_opt, prepare_dir, trajectory_csv, write_file, write_json, MatrixDoc, ReportDocument,
};
use crate::Failure;

const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest acceptable change when the charge window is widened.
const WIDENING_TOLERANCE: f64 = 1e-6;

fn report<'a, T: Serialize>(command: &'static str, config: &'a RunConfig, warnings: &'a [String], results: T) -> ReportDocument<'a, T> {
    ReportDocument { tool: "geophase", version: VERSION, command, config, warnings, results }
}

fn emit_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn initial_state(cfg: &RunConfig) -> Result<StateVector, Failure> {
    StateVector::normalized(vec![Complex64::new(cfg.alpha_re, cfg.alpha_im), Complex64::new(cfg.beta_re, cfg.beta_im)])
        .map_err(|e| Failure::input(format!("initial state: {e}")))
}

fn device(cfg: &RunConfig) -> Result<DeviceParams, Failure> {
    cfg.device().map_err(Failure::input)
}

#[derive(Serialize)]
struct SingleResults<'a> {
    delta: f64,
    tau: f64,
    step3_mode: Step3Mode,
    gamma_predicted: f64,
    gamma_measured: Option<f64>,
    final_state: [[f64; 2]; 2],
    p_up: f64,
    p_down: f64,
    prediction_fidelity: f64,
    prediction_residual: f64,
    cyclicity_defect: f64,
    loop_closed: bool,
    eigenstates: Option<&'a EigenstatePhases>,
    trajectory_file: &'static str,
}

pub fn simulate_single(cfg: &RunConfig) -> Result<u8, Failure> {
    let params = device(cfg)?;
    let plan = SingleQubitPlan::new(&params, cfg.delta, cfg.step3_mode)?;
    let initial = initial_state(cfg)?;
    let run = run_single_qubit(&params, &plan, &initial, cfg.method, cfg.samples)?;

    let mut warnings = params.warnings();
    let loop_closed = run.cyclicity_defect <= CYCLICITY_TOLERANCE;
    if !loop_closed {
        warnings.push(format!("sigma_y eigenstate loop does not close (cyclicity defect {:e})", run.cyclicity_defect));
    }
    let a = run.final_state.amplitudes();
    let p = run.final_state.populations();
    let results = SingleResults {
        delta: plan.delta,
        tau: plan.tau(),
        step3_mode: plan.step3_mode,
        gamma_predicted: run.gamma_predicted,
        gamma_measured: run.eigenstates.as_ref().map(|e| e.gamma_measured),
        final_state: [[a[0].re, a[0].im], [a[1].re, a[1].im]],
        p_up: p[0],
        p_down: p[1],
        prediction_fidelity: run.prediction_fidelity,
        prediction_residual: 1.0 - run.prediction_fidelity,
        cyclicity_defect: run.cyclicity_defect,
        loop_closed,
        eigenstates: run.eigenstates.as_ref(),
        trajectory_file: "trajectory.csv",
    };

    prepare_dir(&cfg.out)?;
    write_file(&cfg.out, "trajectory.csv", &trajectory_csv(&run.trajectory)?)?;
    write_json(&cfg.out, "single_report.json", &report("simulate-single", cfg, &warnings, &results))?;
    emit_warnings(&warnings);
    println!("delta = {}  tau = {}", fmt_f64(plan.delta), fmt_f64(plan.tau()));
    println!("gamma predicted = {}  measured = {}", fmt_f64(run.gamma_predicted), fmt_opt(results.gamma_measured));
    println!("P(up) = {}  P(down) = {}", fmt_f64(p[0]), fmt_f64(p[1]));
    Ok(0)
}

#[derive(Serialize)]
struct CalibrationResults {
    #[serde(flatten)]
    calibration: Calibration,
    tau_predicted: f64,
}

pub fn calibrate(cfg: &RunConfig) -> Result<u8, Failure> {
    let params = device(cfg)?;
    let calibration = calibrate_delta(&params, cfg.target_gamma)?;
    let mut warnings = params.warnings();
    if calibration.used_bisection {
        warnings.push("analytic offset missed the target; bisection on the simulated phase was used".into());
    }
    let results = CalibrationResults { calibration, tau_predicted: protocol_tau(&params, calibration.delta) };
    prepare_dir(&cfg.out)?;
    write_json(&cfg.out, "calibration.json", &report("calibrate", cfg, &warnings, &results))?;
    emit_warnings(&warnings);
    println!("delta = {}", fmt_f64(calibration.delta));
    println!("tau = {}", fmt_f64(results.tau_predicted));
    println!("residual = {}", fmt_f64(calibration.residual));
    Ok(0)
}

#[derive(Serialize)]
struct GateResults {
    #[serde(flatten)]
    scalars: ThetaRow,
    rotation_mode: geophase::protocol::two_qubit::RotationMode,
    compensation: geophase::protocol::two_qubit::CompensationMode,
    unitary: MatrixDoc,
    conditional_unitary: MatrixDoc,
}

pub fn simulate_cnot(cfg: &RunConfig) -> Result<u8, Failure> {
    let params = device(cfg)?;
    let plan = TwoQubitPlan::new(cfg.theta, cfg.rotation_mode, cfg.compensation)?;
    let gate = run_conditional_gate_with(&params, &plan, cfg.execution)?;
    let warnings = params.warnings();
    let results = GateResults {
        scalars: ThetaRow::from_report(cfg.theta, &gate),
        rotation_mode: plan.rotation_mode,
        compensation: plan.compensation_mode,
        unitary: MatrixDoc::from(&gate.unitary),
        conditional_unitary: MatrixDoc::from(&gate.conditional_unitary),
    };
    prepare_dir(&cfg.out)?;
    write_json(&cfg.out, "cnot_report.json", &report("simulate-cnot", cfg, &warnings, &results))?;
    emit_warnings(&warnings);
    println!("gamma target = {}  measured = {}", fmt_f64(gate.gamma_target), fmt_f64(gate.gamma_measured));
    println!("fidelity vs target = {}", fmt_f64(gate.fidelity_vs_target));
    println!("cnot fidelity = {}", fmt_f64(gate.cnot_fidelity));
    Ok(0)
}

const DELTA_COLUMNS: [&str; 14] = [
    "delta",
    "tau",
    "gamma_predicted",
    "gamma_measured",
    "prediction_fidelity",
    "p_up",
    "p_down",
    "cyclicity_defect",
    "geometric_plus",
    "geometric_minus",
    "dynamic_plus",
    "dynamic_minus",
    "phase_area_mismatch",
    "geodesic_deviation",
];

fn delta_fields(r: &DeltaRow) -> Vec<String> {
    vec![
        fmt_f64(r.delta),
        fmt_f64(r.tau),
        fmt_f64(r.gamma_predicted),
        fmt_opt(r.gamma_measured),
        fmt_f64(r.prediction_fidelity),
        fmt_f64(r.p_up),
        fmt_f64(r.p_down),
        fmt_f64(r.cyclicity_defect),
        fmt_opt(r.geometric_plus),
        fmt_opt(r.geometric_minus),
        fmt_opt(r.dynamic_plus),
        fmt_opt(r.dynamic_minus),
        fmt_opt(r.phase_area_mismatch),
        fmt_opt(r.geodesic_deviation),
    ]
}

const THETA_COLUMNS: [&str; 11] = [
    "theta",
    "duration",
    "gamma_target",
    "gamma_measured",
    "block_phase_empty",
    "block_phase_pair",
    "block_phase_error",
    "leakage",
    "fidelity_vs_target",
    "cnot_fidelity",
    "conditional_identity_defect",
];

fn theta_fields(r: &ThetaRow) -> Vec<String> {
    [
        r.theta,
        r.duration,
        r.gamma_target,
        r.gamma_measured,
        r.block_phase_empty,
        r.block_phase_pair,
        r.block_phase_error,
        r.leakage,
        r.fidelity_vs_target,
        r.cnot_fidelity,
        r.conditional_identity_defect,
    ]
    .into_iter()
    .map(fmt_f64)
    .collect()
}

#[derive(Serialize)]
#[serde(untagged)]
enum SweepRows {
    Delta(Vec<DeltaRow>),
    Theta(Vec<ThetaRow>),
}

#[derive(Serialize)]
struct SweepResults {
    kind: SweepKind,
    grid: Vec<f64>,
    csv_file: &'static str,
    rows: SweepRows,
}

pub fn sweep(cfg: &RunConfig) -> Result<u8, Failure> {
    let params = device(cfg)?;
    let grid = cfg.sweep_grid();
    if grid.is_empty() {
        return Err(Failure::input("sweep grid is empty"));
    }
    let mut warnings = params.warnings();
    let (table, rows) = match cfg.sweep_kind {
        SweepKind::Delta => {
            let sweep = DeltaSweep { step3_mode: cfg.step3_mode, method: cfg.method, samples_per_segment: cfg.samples };
            let rows = delta_sweep(&params, &grid, &initial_state(cfg)?, sweep, cfg.execution)?;
            let open = rows.iter().filter(|r| r.cyclicity_defect > CYCLICITY_TOLERANCE).count();
            if open > 0 {
                warnings.push(format!("sigma_y eigenstate loop does not close at {open} grid points"));
            }
            let fields: Vec<_> = rows.iter().map(delta_fields).collect();
            (csv_table(&DELTA_COLUMNS, &fields), SweepRows::Delta(rows))
        }
        SweepKind::Theta => {
            let rows = theta_sweep(&params, &grid, cfg.rotation_mode, cfg.compensation, cfg.execution)?;
            let fields: Vec<_> = rows.iter().map(theta_fields).collect();
            (csv_table(&THETA_COLUMNS, &fields), SweepRows::Theta(rows))
        }
    };
    let results = SweepResults { kind: cfg.sweep_kind, grid, csv_file: "sweep.csv", rows };
    prepare_dir(&cfg.out)?;
    write_file(&cfg.out, "sweep.csv", &table)?;
    write_json(&cfg.out, "sweep_report.json", &report("sweep", cfg, &warnings, &results))?;
    emit_warnings(&warnings);
    print!("{table}");
    Ok(0)
}

#[derive(Serialize)]
struct ValidateResults {
    n_min: i32,
    n_max: i32,
    levels: usize,
    points: Vec<ValidityPoint>,
    discrepancy_monotone: bool,
    csv_file: &'static str,
}

pub fn validate(cfg: &RunConfig) -> Result<u8, Failure> {
    let window = cfg.window().map_err(Failure::input)?;
    if cfg.ratios.is_empty() {
        return Err(Failure::input("ratios list is empty"));
    }
    let points = validity_sweep(cfg.e_ch, &cfg.ratios, window, cfg.execution)?;
    let monotone = discrepancy_is_monotone(&points);
    let mut warnings = Vec::new();
    for p in points.iter().filter(|p| p.ratio <= 0.1 && p.widening_change >= WIDENING_TOLERANCE) {
        warnings.push(format!(
            "charge window not converged at e_j0/e_ch = {}: widening changes results by {:e}",
            p.ratio, p.widening_change
        ));
    }
    let fields: Vec<Vec<String>> = points
        .iter()
        .map(|p| [p.ratio, p.e_j0, p.delta, p.leakage, p.discrepancy, p.widening_change].into_iter().map(fmt_f64).collect())
        .collect();
    let table = csv_table(&["ratio", "e_j0", "delta", "leakage", "discrepancy", "widening_change"], &fields);
    let results = ValidateResults {
        n_min: window.n_min,
        n_max: window.n_max,
        levels: window.levels(),
        points,
        discrepancy_monotone: monotone,
        csv_file: "validate.csv",
    };
    prepare_dir(&cfg.out)?;
    write_file(&cfg.out, "validate.csv", &table)?;
    write_json(&cfg.out, "validate_report.json", &report("validate", cfg, &warnings, &results))?;
    emit_warnings(&warnings);
    print!("{table}");
    if monotone {
        Ok(0)
    } else {
        eprintln!("assertion failed: discrepancy is not monotone decreasing over the ratio sweep");
        Ok(Failure::ASSERTION)
    }
}
