//! Parameter sweeps over the single-qubit offset `δ` and the two-qubit
//! angle `θ`. Grid points run independently; rows come back in grid order.

use serde::{Deserialize, Serialize};

use crate::device::DeviceParams;
use crate::error::Result;
use crate::evolution::Method;
use crate::exec::Execution;
use crate::protocol::single::{run_single_qubit, SingleQubitPlan, SingleQubitRun, Step3Mode};
use crate::protocol::two_qubit::{run_conditional_gate_with, CompensationMode, GateReport, RotationMode, TwoQubitPlan};
use crate::state::StateVector;

/// Scalars of one single-qubit run. Eigenstate columns are `None` in
/// literal mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub delta: f64,
    pub tau: f64,
    pub gamma_predicted: f64,
    pub gamma_measured: Option<f64>,
    pub prediction_fidelity: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub cyclicity_defect: f64,
    pub geometric_plus: Option<f64>,
    pub geometric_minus: Option<f64>,
    pub dynamic_plus: Option<f64>,
    pub dynamic_minus: Option<f64>,
    pub phase_area_mismatch: Option<f64>,
    pub geodesic_deviation: Option<f64>,
}

impl DeltaRow {
    pub fn from_run(plan: &SingleQubitPlan, run: &SingleQubitRun) -> Self {
        let p = run.final_state.populations();
        let e = run.eigenstates.as_ref();
        Self {
            delta: plan.delta,
            tau: plan.tau(),
            gamma_predicted: run.gamma_predicted,
            gamma_measured: e.map(|e| e.gamma_measured),
            prediction_fidelity: run.prediction_fidelity,
            p_up: p[0],
            p_down: p[1],
            cyclicity_defect: run.cyclicity_defect,
            geometric_plus: e.map(|e| e.plus.geometric_phase),
            geometric_minus: e.map(|e| e.minus.geometric_phase),
            dynamic_plus: e.map(|e| e.plus.dynamic_phase),
            dynamic_minus: e.map(|e| e.minus.dynamic_phase),
            phase_area_mismatch: e.map(|e| e.plus_consistency.mismatch.max(e.minus_consistency.mismatch)),
            geodesic_deviation: e.map(|e| e.geodesic_deviation),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSweep {
    pub step3_mode: Step3Mode,
    pub method: Method,
    pub samples_per_segment: usize,
}

pub fn delta_sweep(
    params: &DeviceParams,
    deltas: &[f64],
    initial: &StateVector,
    config: DeltaSweep,
    exec: Execution,
) -> Result<Vec<DeltaRow>> {
    exec.try_map(deltas, |&delta| {
        let plan = SingleQubitPlan::new(params, delta, config.step3_mode)?;
        let run = run_single_qubit(params, &plan, initial, config.method, config.samples_per_segment)?;
        Ok(DeltaRow::from_run(&plan, &run))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub theta: f64,
    pub duration: f64,
    pub gamma_target: f64,
    pub gamma_measured: f64,
    pub block_phase_empty: f64,
    pub block_phase_pair: f64,
    pub block_phase_error: f64,
    pub leakage: f64,
    pub fidelity_vs_target: f64,
    pub cnot_fidelity: f64,
    pub conditional_identity_defect: f64,
}

impl ThetaRow {
    pub fn from_report(theta: f64, r: &GateReport) -> Self {
        Self {
            theta,
            duration: r.duration,
            gamma_target: r.gamma_target,
            gamma_measured: r.gamma_measured,
            block_phase_empty: r.block_phases[0],
            block_phase_pair: r.block_phases[1],
            block_phase_error: r.block_phase_error,
            leakage: r.leakage,
            fidelity_vs_target: r.fidelity_vs_target,
            cnot_fidelity: r.cnot_fidelity,
            conditional_identity_defect: r.conditional_identity_defect,
        }
    }
}

pub fn theta_sweep(
    params: &DeviceParams,
    thetas: &[f64],
    rotation_mode: RotationMode,
    compensation_mode: CompensationMode,
    exec: Execution,
) -> Result<Vec<ThetaRow>> {
    exec.try_map(thetas, |&theta| {
        let plan = TwoQubitPlan::new(theta, rotation_mode, compensation_mode)?;
        // the outer map already spreads the work
        let report = run_conditional_gate_with(params, &plan, Execution::Sequential)?;
        Ok(ThetaRow::from_report(theta, &report))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn delta_rows_follow_grid_order_and_gamma_is_monotone() {
        let params = DeviceParams::default();
        let deltas = [0.0, 0.01, 0.02, 0.04, 0.08];
        let cfg = DeltaSweep { step3_mode: Step3Mode::Symmetric, method: Method::ClosedForm, samples_per_segment: 101 };
        let rows = delta_sweep(&params, &deltas, &StateVector::down(), cfg, Execution::Parallel).unwrap();
        assert_eq!(rows.iter().map(|r| r.delta).collect::<Vec<_>>(), deltas);
        let g: Vec<f64> = rows.iter().map(|r| r.gamma_measured.unwrap()).collect();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((rows[3].p_up - 1.0).abs() < 1e-9);
    }

    #[test]
    fn theta_row_at_eighth_turn() {
        let rows = theta_sweep(
            &DeviceParams::default(),
            &[0.0, PI / 8.0],
            RotationMode::Instantaneous,
            CompensationMode::Derived,
            Execution::Sequential,
        )
        .unwrap();
        assert!((rows[1].gamma_measured.abs() - PI / 4.0).abs() < 1e-9);
        assert!(rows[0].gamma_measured.abs() < 1e-9);
    }
}
