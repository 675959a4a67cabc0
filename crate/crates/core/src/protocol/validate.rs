//! Checks the two-level reduction against a truncated charge basis.
//!
//! The single-qubit protocol is run with the full `E_ch (n - n_x)² - E_J cos χ`
//! Hamiltonian on a finite window of pair numbers. Leakage is the weight
//! left outside `n ∈ {0, 1}`; the discrepancy compares the projected
//! charge-basis state with the two-level result, mapping `|↑⟩ → n = 0` and
//! `|↓⟩ → n = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{charge_hamiltonian, schedule_hamiltonians, ControlSegment, DeviceParams};
use crate::error::{Error, Result};
use crate::evolution::{schedule_propagator, TimedHamiltonian};
use crate::exec::Execution;
use crate::protocol::single::{build_single_qubit_schedule, delta_for_gamma, SingleQubitPlan, Step3Mode};
use crate::state::StateVector;

/// Largest window accepted, in levels.
pub const MAX_WINDOW_LEVELS: usize = 64;
pub const VALIDITY_RATIOS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Inclusive range of pair numbers kept in the charge basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeWindow {
    pub n_min: i32,
    pub n_max: i32,
}

impl Default for ChargeWindow {
    fn default() -> Self {
        Self { n_min: -2, n_max: 3 }
    }
}

impl ChargeWindow {
    pub fn new(n_min: i32, n_max: i32) -> Result<Self> {
        if n_min > 0 || n_max < 1 {
            return Err(Error::InvalidParameter(format!("charge window [{n_min}, {n_max}] must contain 0 and 1")));
        }
        let w = Self { n_min, n_max };
        if w.levels() > MAX_WINDOW_LEVELS {
            return Err(Error::InvalidParameter(format!("charge window has {} levels, at most {MAX_WINDOW_LEVELS}", w.levels())));
        }
        Ok(w)
    }

    pub fn levels(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    /// One more level on each side.
    pub fn widened(&self) -> Self {
        Self { n_min: self.n_min - 1, n_max: self.n_max + 1 }
    }

    pub fn index(&self, n: i32) -> Option<usize> {
        (self.n_min..=self.n_max).contains(&n).then(|| (n - self.n_min) as usize)
    }
}

/// Evolves the pair-number eigenstate `n` through `segments` on `window`.
pub fn charge_basis_final_state(
    params: &DeviceParams,
    segments: &[ControlSegment],
    window: ChargeWindow,
    initial_charge: i32,
) -> Result<StateVector> {
    let start = window
        .index(initial_charge)
        .ok_or_else(|| Error::InvalidParameter(format!("initial charge {initial_charge} is outside the window")))?;
    let timed = segments
        .iter()
        .map(|s| Ok(TimedHamiltonian::new(charge_hamiltonian(params, s, window.n_min, window.n_max)?, s.duration)))
        .collect::<Result<Vec<_>>>()?;
    let u = schedule_propagator(&timed)?;
    Ok(u.apply(&StateVector::basis(window.levels(), start)))
}

/// `1 - P(n ∈ {0, 1})`.
pub fn leakage(state: &StateVector, window: ChargeWindow) -> f64 {
    let p = state.populations();
    let kept: f64 = [0, 1].iter().filter_map(|&n| window.index(n)).map(|i| p[i]).sum();
    (1.0 - kept).max(0.0)
}

/// Amplitudes on `(n = 0, n = 1)`, not renormalized.
pub fn computational_projection(state: &StateVector, window: ChargeWindow) -> [Complex64; 2] {
    let a = state.amplitudes();
    [a[window.index(0).expect("window holds 0")], a[window.index(1).expect("window holds 1")]]
}

/// `1 - |⟨ψ₂|Pψ⟩|²`; counts leaked weight as well as in-subspace error.
pub fn discrepancy(two_level: &StateVector, charge: &StateVector, window: ChargeWindow) -> f64 {
    let p = computational_projection(charge, window);
    let a = two_level.amplitudes();
    let overlap = a[0].conj() * p[0] + a[1].conj() * p[1];
    (1.0 - overlap.norm_sqr()).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityPoint {
    /// `E_J0 / E_ch`.
    pub ratio: f64,
    pub e_j0: f64,
    pub delta: f64,
    pub leakage: f64,
    pub discrepancy: f64,
    /// Largest change in leakage, discrepancy or final state when the
    /// window grows by one level on each side.
    pub widening_change: f64,
}

/// Protocol at `E_J0 = ratio · E_ch`, calibrated for `γ = π/2`, started in
/// `n = 1`.
pub fn validity_point(e_ch: f64, ratio: f64, window: ChargeWindow) -> Result<ValidityPoint> {
    let params = DeviceParams::new(ratio * e_ch, e_ch, DeviceParams::default().delta_coupling)?;
    let delta = delta_for_gamma(&params, PI / 2.0);
    let plan = SingleQubitPlan::new(&params, delta, Step3Mode::Symmetric)?;
    let schedule = build_single_qubit_schedule(&plan);
    let two_level = schedule_propagator(&schedule_hamiltonians(&params, &schedule)?)?.apply(&StateVector::down());

    let narrow = charge_basis_final_state(&params, &schedule.qubit1, window, 1)?;
    let wide_window = window.widened();
    let wide = charge_basis_final_state(&params, &schedule.qubit1, wide_window, 1)?;

    let leak = leakage(&narrow, window);
    let disc = discrepancy(&two_level, &narrow, window);
    let padded: Vec<Complex64> = (wide_window.n_min..=wide_window.n_max)
        .map(|n| window.index(n).map_or(Complex64::new(0.0, 0.0), |i| narrow.amplitudes()[i]))
        .collect();
    let state_change = (1.0 - StateVector::normalized(padded)?.fidelity(&wide)).max(0.0);
    let widening_change = (leakage(&wide, wide_window) - leak)
        .abs()
        .max((discrepancy(&two_level, &wide, wide_window) - disc).abs())
        .max(state_change);

    Ok(ValidityPoint { ratio, e_j0: params.e_j0, delta, leakage: leak, discrepancy: disc, widening_change })
}

pub fn validity_sweep(e_ch: f64, ratios: &[f64], window: ChargeWindow, exec: Execution) -> Result<Vec<ValidityPoint>> {
    exec.try_map(ratios, |&r| validity_point(e_ch, r, window))
}

/// Strictly decreasing discrepancy along the sweep order.
pub fn discrepancy_is_monotone(points: &[ValidityPoint]) -> bool {
    points.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy)
}
