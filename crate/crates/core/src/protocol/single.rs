//! Single-qubit sudden-switching protocol.
//!
//! Starting from the idle point (`f = ½`, `n_x = 0`), flux is switched to
//! `f = 0` and the offset charge to `½(1 - δ)` for a time `τ`, then to the
//! mirrored offset for another `τ`, where
//!
//! ```text
//! τ = π / √((E_ch δ)² + (2 E_J0)²)
//! ```
//!
//! makes each leg a half turn. The σ_y eigenstates run along two half great
//! circles perpendicular to the field, so they pick up no dynamic phase and
//! the whole protocol acts as
//!
//! ```text
//! U(2τ) = -exp(-iγσ_y),   γ = 2 arctan(E_ch δ / 2E_J0)
//! ```
//!
//! The leading minus sign is the spinor sign of the net `2π` turn: `|±y⟩`
//! acquire `π ∓ γ`, all of it geometric. From `|↓⟩` the final state is
//! `sin γ |↑⟩ - cos γ |↓⟩`, a full flip at `γ = π/2`.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{schedule_hamiltonians, ControlSegment, DeviceParams, Schedule};
use crate::error::{Error, Result};
use crate::evolution::{evolve_schedule, schedule_propagator, Method, Trajectory};
use crate::phase::{geodesic_deviation, geometric_phase, phase_consistency, wrap_phase, PhaseConsistency, PhaseReport};
use crate::state::{bloch_from_state, pauli, Operator, StateVector, I};

/// How the second leg sets the offset charge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step3Mode {
    /// `n_x = ½(1 + δ)`, mirroring the first leg; the eigenstate loop closes.
    #[default]
    Symmetric,
    /// `n_x = ½ + δ`; the z-field doubles and the loop does not close.
    Literal,
}

impl FromStr for Step3Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Step3Mode::Symmetric),
            "literal" => Ok(Step3Mode::Literal),
            other => Err(Error::InvalidParameter(format!("unknown step-3 mode '{other}'"))),
        }
    }
}

/// Leg duration that turns the state by exactly `π`.
pub fn protocol_tau(params: &DeviceParams, delta: f64) -> f64 {
    PI / (params.e_ch * delta).hypot(2.0 * params.e_j0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitPlan {
    pub delta: f64,
    pub step3_mode: Step3Mode,
    tau: f64,
}

impl SingleQubitPlan {
    pub fn new(params: &DeviceParams, delta: f64, step3_mode: Step3Mode) -> Result<Self> {
        params.validate()?;
        if !(delta.is_finite() && (0.0..1.0).contains(&delta)) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { delta, step3_mode, tau: protocol_tau(params, delta) })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Two legs of duration `τ` at `f = 0`. The idle settings before and after
/// are not timed segments.
pub fn build_single_qubit_schedule(plan: &SingleQubitPlan) -> Schedule {
    let first = 0.5 * (1.0 - plan.delta);
    let second = match plan.step3_mode {
        Step3Mode::Symmetric => 0.5 * (1.0 + plan.delta),
        Step3Mode::Literal => 0.5 + plan.delta,
    };
    Schedule::single(vec![
        ControlSegment { n_x: first, flux_frac: 0.0, duration: plan.tau() },
        ControlSegment { n_x: second, flux_frac: 0.0, duration: plan.tau() },
    ])
}

/// `γ = 2 arctan(E_ch δ / 2E_J0)`, half the solid-angle change produced by
/// tilting both rotation axes by `η = arctan(E_ch δ / 2E_J0)`.
pub fn predict_gamma(params: &DeviceParams, delta: f64) -> f64 {
    2.0 * (params.e_ch * delta / (2.0 * params.e_j0)).atan()
}

/// Inverse of [`predict_gamma`].
pub fn delta_for_gamma(params: &DeviceParams, gamma: f64) -> f64 {
    2.0 * params.e_j0 / params.e_ch * (gamma / 2.0).tan()
}

/// `-exp(-iγσ_y)`.
pub fn ideal_protocol_unitary(gamma: f64) -> Operator {
    let (s, c) = gamma.sin_cos();
    (pauli::identity().scale_real(c) - pauli::y().scale(I * s)).scale_real(-1.0)
}

/// `U(2τ)(α|↑⟩ + β|↓⟩) = (β sin γ - α cos γ)|↑⟩ - (α sin γ + β cos γ)|↓⟩`.
pub fn predicted_final_state(alpha: Complex64, beta: Complex64, gamma: f64) -> Result<StateVector> {
    let (s, c) = gamma.sin_cos();
    StateVector::normalized(vec![beta * s - alpha * c, -(alpha * s + beta * c)])
}

/// Full propagator of the schedule.
pub fn protocol_unitary(params: &DeviceParams, plan: &SingleQubitPlan) -> Result<Operator> {
    schedule_propagator(&schedule_hamiltonians(params, &build_single_qubit_schedule(plan))?)
}

/// Phase analysis of both σ_y eigenstates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenstatePhases {
    pub plus: PhaseReport,
    pub minus: PhaseReport,
    pub plus_consistency: PhaseConsistency,
    pub minus_consistency: PhaseConsistency,
    /// `γ` recovered from the eigenstate phases `π ∓ γ`.
    pub gamma_measured: f64,
    /// Largest distance of an eigenstate path from the great circle of its leg.
    pub geodesic_deviation: f64,
}

#[derive(Clone, Debug)]
pub struct SingleQubitRun {
    pub trajectory: Trajectory,
    pub final_state: StateVector,
    pub gamma_predicted: f64,
    /// `|⟨predicted|final⟩|²` against [`predicted_final_state`].
    pub prediction_fidelity: f64,
    /// `1 - |⟨+y|U|+y⟩|`; zero when the eigenstate loop closes.
    pub cyclicity_defect: f64,
    /// `None` in literal mode, where the loops do not close.
    pub eigenstates: Option<EigenstatePhases>,
}

pub fn run_single_qubit(
    params: &DeviceParams,
    plan: &SingleQubitPlan,
    initial: &StateVector,
    method: Method,
    samples_per_segment: usize,
) -> Result<SingleQubitRun> {
    if initial.dim() != 2 {
        return Err(Error::ContractViolation("single-qubit protocol needs a 2-dimensional state".into()));
    }
    let segments = schedule_hamiltonians(params, &build_single_qubit_schedule(plan))?;
    let trajectory = evolve_schedule(&segments, initial, samples_per_segment, method)?;
    let final_state = trajectory.final_state().clone();
    let gamma_predicted = predict_gamma(params, plan.delta);
    let amps = initial.amplitudes();
    let predicted = predicted_final_state(amps[0], amps[1], gamma_predicted)?;
    let prediction_fidelity = predicted.fidelity(&final_state);

    let evolve = |psi: &StateVector| evolve_schedule(&segments, psi, samples_per_segment, method);
    let plus_traj = evolve(&StateVector::plus_y())?;
    let cyclicity_defect = 1.0 - plus_traj.initial().inner(plus_traj.final_state()).norm();

    let eigenstates = match plan.step3_mode {
        Step3Mode::Literal => None,
        Step3Mode::Symmetric => {
            let minus_traj = evolve(&StateVector::minus_y())?;
            let plus = geometric_phase(&plus_traj)?;
            let minus = geometric_phase(&minus_traj)?;
            let g_plus = wrap_phase(PI - plus.geometric_phase_wrapped);
            let g_minus = wrap_phase(minus.geometric_phase_wrapped - PI);
            let gamma_measured = g_plus + wrap_phase(g_minus - g_plus) / 2.0;
            let deviation = leg_deviation(&plus_traj)?.max(leg_deviation(&minus_traj)?);
            Some(EigenstatePhases {
                plus,
                minus,
                plus_consistency: phase_consistency(&plus_traj)?,
                minus_consistency: phase_consistency(&minus_traj)?,
                gamma_measured,
                geodesic_deviation: deviation,
            })
        }
    };

    Ok(SingleQubitRun { trajectory, final_state, gamma_predicted, prediction_fidelity, cyclicity_defect, eigenstates })
}

fn leg_deviation(traj: &Trajectory) -> Result<f64> {
    let samples = traj.samples();
    let mut worst = 0.0f64;
    for seg in 0..traj.hamiltonians().len() {
        let Some(first) = samples.iter().position(|s| s.segment == seg) else { continue };
        let last = samples.iter().rposition(|s| s.segment == seg).unwrap_or(first);
        // each leg starts at the last sample of the previous one
        let start = first.saturating_sub(usize::from(seg > 0));
        let pts = samples[start..=last].iter().map(|s| bloch_from_state(&s.state)).collect::<Result<Vec<_>>>()?;
        worst = worst.max(geodesic_deviation(&pts)?);
    }
    Ok(worst)
}

/// Phase `γ` implemented by the closed-form protocol propagator, read off the
/// `|+y⟩` eigenvalue `-e^{-iγ}`.
pub fn simulated_gamma(params: &DeviceParams, delta: f64) -> Result<f64> {
    let plan = SingleQubitPlan::new(params, delta, Step3Mode::Symmetric)?;
    let u = protocol_unitary(params, &plan)?;
    let psi = StateVector::plus_y();
    Ok(wrap_phase(PI - psi.inner(&u.apply(&psi)).arg()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_gamma: f64,
    pub delta: f64,
    pub tau: f64,
    /// Geometric-phase `γ` measured by simulating the calibrated protocol.
    pub gamma_measured: f64,
    pub residual: f64,
    pub used_bisection: bool,
}

pub const CALIBRATION_TOLERANCE: f64 = 1e-8;

/// Offset `δ` for which the protocol produces `target_gamma`: the analytic
/// inverse, verified by simulation, with a bisection fallback on the
/// simulated (monotone) `γ(δ)`.
pub fn calibrate_delta(params: &DeviceParams, target_gamma: f64) -> Result<Calibration> {
    if !(target_gamma > 0.0 && target_gamma < PI) {
        return Err(Error::UnreachablePhase(target_gamma));
    }
    params.validate()?;
    let mut delta = delta_for_gamma(params, target_gamma);
    let mut used_bisection = false;
    if delta >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "target phase {target_gamma} needs offset delta = {delta} >= 1"
        )));
    }

    let measure = |d: f64| -> Result<f64> {
        let plan = SingleQubitPlan::new(params, d, Step3Mode::Symmetric)?;
        let run = run_single_qubit(params, &plan, &StateVector::down(), Method::ClosedForm, crate::DEFAULT_SAMPLES_PER_SEGMENT)?;
        Ok(run.eigenstates.expect("symmetric mode").gamma_measured)
    };

    let mut gamma_measured = measure(delta)?;
    if (gamma_measured - target_gamma).abs() > CALIBRATION_TOLERANCE {
        used_bisection = true;
        let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if simulated_gamma(params, mid)? < target_gamma {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        delta = 0.5 * (lo + hi);
        gamma_measured = measure(delta)?;
    }
    Ok(Calibration {
        target_gamma,
        delta,
        tau: protocol_tau(params, delta),
        gamma_measured,
        residual: (gamma_measured - target_gamma).abs(),
        used_bisection,
    })
}
