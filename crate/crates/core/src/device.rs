//! Symmetric-SQUID charge-qubit Hamiltonians.
//!
//! Flux enters as the fraction `f = Φ/Φ₀`. The idle point `f = ½` switches
//! the Josephson coupling off. In the two-level picture `|↑⟩` is the
//! zero-pair charge state and `|↓⟩` the one-pair state, which is the
//! labelling under which `H = -½ B·σ` with `B = (E_J, 0, E_ch(1 - 2n_x))`
//! reproduces the charging energies. The pair-number operator is therefore
//! `N = ½(I - σ_z)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::evolution::TimedHamiltonian;
use crate::state::{kron, pauli, Operator};

/// Ratio above which the charging-regime approximation is flagged.
pub const CHARGING_REGIME_WARN_RATIO: f64 = 0.2;
/// Ratio above which the weak-coupling approximation is flagged.
pub const WEAK_COUPLING_WARN_RATIO: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Single-junction Josephson energy `E_J0`.
    pub e_j0: f64,
    /// Charging energy `E_ch`.
    pub e_ch: f64,
    /// Capacitive coupling `Δ` between two boxes.
    pub delta_coupling: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self { e_j0: 1.0, e_ch: 50.0, delta_coupling: 1.0 }
    }
}

impl DeviceParams {
    pub fn new(e_j0: f64, e_ch: f64, delta_coupling: f64) -> Result<Self> {
        let p = Self { e_j0, e_ch, delta_coupling };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j0.is_finite() && self.e_j0 > 0.0) {
            return Err(Error::InvalidParameter(format!("e_j0 must be positive, got {}", self.e_j0)));
        }
        if !(self.e_ch.is_finite() && self.e_ch > 0.0) {
            return Err(Error::InvalidParameter(format!("e_ch must be positive, got {}", self.e_ch)));
        }
        if !(self.delta_coupling.is_finite() && self.delta_coupling >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_coupling must be non-negative, got {}",
                self.delta_coupling
            )));
        }
        Ok(())
    }

    /// Validity conditions of the two-level and weak-coupling reductions
    /// that these parameters violate.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let r = self.e_j0 / self.e_ch;
        if r >= 1.0 {
            out.push(format!("not in the charging regime: e_j0/e_ch = {r}"));
        } else if r > CHARGING_REGIME_WARN_RATIO {
            out.push(format!("weak charging regime: e_j0/e_ch = {r} > {CHARGING_REGIME_WARN_RATIO}"));
        }
        let c = self.delta_coupling / self.e_ch;
        if c >= 1.0 {
            out.push(format!("coupling not weak: delta_coupling/e_ch = {c}"));
        } else if c > WEAK_COUPLING_WARN_RATIO {
            out.push(format!("strong coupling: delta_coupling/e_ch = {c} > {WEAK_COUPLING_WARN_RATIO}"));
        }
        out
    }

    pub fn with_coupling(mut self, delta_coupling: f64) -> Self {
        self.delta_coupling = delta_coupling;
        self
    }
}

/// Control settings held for `duration`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub n_x: f64,
    pub flux_frac: f64,
    pub duration: f64,
}

impl ControlSegment {
    pub fn new(n_x: f64, flux_frac: f64, duration: f64) -> Result<Self> {
        if !(n_x.is_finite() && flux_frac.is_finite()) {
            return Err(Error::InvalidParameter("control settings must be finite".into()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter(format!("segment duration must be positive, got {duration}")));
        }
        Ok(Self { n_x, flux_frac, duration })
    }

    /// Same settings, different duration (unchecked; used when splitting).
    pub fn with_duration(self, duration: f64) -> Self {
        Self { duration, ..self }
    }
}

/// `E_J(f) = 2 E_J0 cos(π f)`; negative values are legal.
pub fn josephson_energy(e_j0: f64, flux_frac: f64) -> f64 {
    2.0 * e_j0 * (PI * flux_frac).cos()
}

/// Fictitious field `B = (E_J, 0, E_ch (1 - 2 n_x))`.
pub fn effective_field(params: &DeviceParams, seg: &ControlSegment) -> [f64; 3] {
    [josephson_energy(params.e_j0, seg.flux_frac), 0.0, params.e_ch * (1.0 - 2.0 * seg.n_x)]
}

/// `H = -½ (B_x σ_x + B_z σ_z)`.
pub fn two_level_hamiltonian(params: &DeviceParams, seg: &ControlSegment) -> Operator {
    pauli::dot(effective_field(params, seg)).scale_real(-0.5)
}

/// Cooper-pair number in the two-level space, `N = ½(I - σ_z)`.
pub fn pair_number() -> Operator {
    (pauli::identity() - pauli::z()).scale_real(0.5)
}

/// Charge-basis Hamiltonian `E_ch (n - n_x)² - E_J cos χ` on the window
/// `n_min ..= n_max`, ordered by increasing `n`.
pub fn charge_hamiltonian(params: &DeviceParams, seg: &ControlSegment, n_min: i32, n_max: i32) -> Result<Operator> {
    if n_max <= n_min {
        return Err(contract(format!("charge window [{n_min}, {n_max}] needs n_max > n_min")));
    }
    let dim = (n_max - n_min + 1) as usize;
    let e_j = josephson_energy(params.e_j0, seg.flux_frac);
    let mut entries = vec![0.0; dim * dim];
    for i in 0..dim {
        let n = (n_min + i as i32) as f64;
        entries[i * dim + i] = params.e_ch * (n - seg.n_x).powi(2);
        if i + 1 < dim {
            // ⟨n|cos χ|n±1⟩ = ½
            entries[i * dim + i + 1] = -0.5 * e_j;
            entries[(i + 1) * dim + i] = -0.5 * e_j;
        }
    }
    Operator::from_real_rows(dim, &entries)
}

/// Two capacitively coupled boxes:
/// `H₁⊗I + I⊗H₂ + Δ (N₁ - n_{x,1}) ⊗ (N₂ - n_{x,2})`.
pub fn coupled_hamiltonian(params: &DeviceParams, seg1: &ControlSegment, seg2: &ControlSegment) -> Operator {
    let id = pauli::identity();
    let h1 = kron(&two_level_hamiltonian(params, seg1), &id).expect("2x2");
    let h2 = kron(&id, &two_level_hamiltonian(params, seg2)).expect("2x2");
    let mut h = h1 + h2;
    if params.delta_coupling != 0.0 {
        let n1 = pair_number() - id.scale_real(seg1.n_x);
        let n2 = pair_number() - id.scale_real(seg2.n_x);
        h = h + kron(&n1, &n2).expect("2x2").scale_real(params.delta_coupling);
    }
    h
}

/// Piecewise-constant controls for one qubit, or two qubits on a shared
/// time grid. A single-qubit schedule leaves `qubit2` empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub qubit1: Vec<ControlSegment>,
    pub qubit2: Vec<ControlSegment>,
    pub coupling_on: bool,
}

impl Schedule {
    pub fn single(segments: Vec<ControlSegment>) -> Self {
        Self { qubit1: segments, qubit2: Vec::new(), coupling_on: false }
    }

    /// Two-qubit schedule; segments of both lists are split at the union of
    /// their boundaries so the grids coincide.
    pub fn merged(qubit1: &[ControlSegment], qubit2: &[ControlSegment], coupling_on: bool) -> Result<Self> {
        let total1: f64 = qubit1.iter().map(|s| s.duration).sum();
        let total2: f64 = qubit2.iter().map(|s| s.duration).sum();
        if qubit1.is_empty() || qubit2.is_empty() {
            return Err(Error::EmptySchedule);
        }
        if !close(total1, total2) {
            return Err(Error::MisalignedSchedule { time: total1.min(total2) });
        }
        let mut cuts: Vec<f64> = boundaries(qubit1).into_iter().chain(boundaries(qubit2)).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| close(*a, *b));
        Ok(Self { qubit1: split(qubit1, &cuts), qubit2: split(qubit2, &cuts), coupling_on })
    }

    pub fn is_single_qubit(&self) -> bool {
        self.qubit2.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.qubit1.iter().map(|s| s.duration).sum()
    }
}

/// Hamiltonian per segment: 2x2 for single-qubit schedules, 4x4 on the
/// merged grid for two-qubit schedules.
pub fn schedule_hamiltonians(params: &DeviceParams, schedule: &Schedule) -> Result<Vec<TimedHamiltonian>> {
    if schedule.qubit1.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if schedule.is_single_qubit() {
        return Ok(schedule
            .qubit1
            .iter()
            .map(|s| TimedHamiltonian::new(two_level_hamiltonian(params, s), s.duration))
            .collect());
    }
    if schedule.qubit1.len() != schedule.qubit2.len() {
        let b1 = boundaries(&schedule.qubit1);
        let b2 = boundaries(&schedule.qubit2);
        let time = b1.iter().zip(&b2).find(|(a, b)| !close(**a, **b)).map(|(a, _)| *a).unwrap_or(0.0);
        return Err(Error::MisalignedSchedule { time });
    }
    let coupled = if schedule.coupling_on { *params } else { params.with_coupling(0.0) };
    let mut t = 0.0;
    schedule
        .qubit1
        .iter()
        .zip(&schedule.qubit2)
        .map(|(a, b)| {
            t += a.duration;
            if !close(a.duration, b.duration) {
                return Err(Error::MisalignedSchedule { time: t });
            }
            Ok(TimedHamiltonian::new(coupled_hamiltonian(&coupled, a, b), a.duration))
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn boundaries(segments: &[ControlSegment]) -> Vec<f64> {
    segments
        .iter()
        .scan(0.0, |t, s| {
            *t += s.duration;
            Some(*t)
        })
        .collect()
}

fn split(segments: &[ControlSegment], cuts: &[f64]) -> Vec<ControlSegment> {
    let mut out = Vec::new();
    let mut start = 0.0;
    let mut cut = cuts.iter().peekable();
    for seg in segments {
        let end = start + seg.duration;
        let mut from = start;
        while let Some(&&c) = cut.peek() {
            if c < end && !close(c, end) {
                out.push(seg.with_duration(c - from));
                from = c;
                cut.next();
            } else {
                break;
            }
        }
        out.push(seg.with_duration(end - from));
        // the cut at this segment's own end
        if cut.peek().is_some_and(|&&c| close(c, end)) {
            cut.next();
        }
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::HermitianEigen;
    use num_complex::Complex64;

    fn seg(n_x: f64, f: f64) -> ControlSegment {
        ControlSegment::new(n_x, f, 1.0).unwrap()
    }

    #[test]
    fn josephson_energy_examples() {
        assert!((josephson_energy(1.0, 0.0) - 2.0).abs() < 1e-15);
        assert!(josephson_energy(1.0, 0.5).abs() < 1e-15);
        assert!((josephson_energy(1.0, 1.0 / 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn effective_field_examples() {
        let p = DeviceParams::default();
        let b = effective_field(&p, &seg(0.48, 0.0));
        assert!((b[0] - 2.0).abs() < 1e-14 && b[1] == 0.0 && (b[2] - 2.0).abs() < 1e-12);
        assert_eq!(effective_field(&p, &seg(0.5, 0.0)), [2.0, 0.0, 0.0]);
        let b = effective_field(&p, &seg(0.0, 0.5));
        assert!(b[0].abs() < 1e-15 && b[2] == 50.0);
    }

    #[test]
    fn two_level_hamiltonian_examples() {
        let p = DeviceParams::default();
        assert!(two_level_hamiltonian(&p, &seg(0.5, 0.5)).max_abs() < 1e-15);
        let h = two_level_hamiltonian(&p, &seg(0.0, 0.5));
        assert!(h.max_abs_diff(&pauli::z().scale_real(-25.0)) < 1e-14);
        let s = seg(0.37, 0.12);
        let b = effective_field(&p, &s);
        let eig = HermitianEigen::new(&two_level_hamiltonian(&p, &s)).unwrap();
        let half = 0.5 * (b[0] * b[0] + b[2] * b[2]).sqrt();
        let mut e = eig.eigenvalues().to_vec();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + half).abs() < 1e-12 && (e[1] - half).abs() < 1e-12);
    }

    #[test]
    fn charge_hamiltonian_without_josephson_is_parabola() {
        let p = DeviceParams::default();
        let h = charge_hamiltonian(&p, &seg(0.3, 0.5), -2, 3).unwrap();
        for (i, n) in (-2..=3).enumerate() {
            assert!((h.get(i, i).re - 50.0 * (n as f64 - 0.3).powi(2)).abs() < 1e-12);
        }
        for r in 0..6 {
            for c in 0..6 {
                if r != c {
                    assert!(h.get(r, c).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn charge_hamiltonian_at_degeneracy_has_gap_ej() {
        let p = DeviceParams::default();
        let h = charge_hamiltonian(&p, &seg(0.5, 0.0), 0, 1).unwrap();
        assert!((h.get(0, 0).re - 12.5).abs() < 1e-12 && (h.get(1, 1).re - 12.5).abs() < 1e-12);
        assert!((h.get(0, 1).re + 1.0).abs() < 1e-15);
        let mut e = HermitianEigen::new(&h).unwrap().eigenvalues().to_vec();
        e.sort_by(f64::total_cmp);
        assert!((e[1] - e[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn charge_window_must_be_nonempty() {
        assert!(charge_hamiltonian(&DeviceParams::default(), &seg(0.5, 0.0), 1, 1).is_err());
    }

    #[test]
    fn two_state_charge_block_equals_two_level_model() {
        let p = DeviceParams::new(1.3, 40.0, 0.0).unwrap();
        for &(nx, f) in &[(0.0, 0.0), (0.48, 0.1), (0.5, 0.5), (0.9, -0.3), (1.4, 0.77)] {
            let s = seg(nx, f);
            let h = charge_hamiltonian(&p, &s, 0, 1).unwrap();
            let shifted = h.clone() - Operator::identity(2).scale(h.trace() * 0.5);
            assert!(shifted.max_abs_diff(&two_level_hamiltonian(&p, &s)) < 1e-12, "n_x={nx}, f={f}");
        }
    }

    #[test]
    fn uncoupled_hamiltonian_is_tensor_sum() {
        let p = DeviceParams::new(1.0, 50.0, 0.0).unwrap();
        let (a, b) = (seg(0.2, 0.1), seg(0.45, 0.0));
        let id = pauli::identity();
        let expected = kron(&two_level_hamiltonian(&p, &a), &id).unwrap() + kron(&id, &two_level_hamiltonian(&p, &b)).unwrap();
        assert_eq!(coupled_hamiltonian(&p, &a, &b), expected);
    }

    #[test]
    fn interaction_vanishes_for_empty_control_box() {
        let p = DeviceParams::new(1.0, 50.0, 0.7).unwrap();
        let (a, b) = (seg(0.0, 0.5), seg(0.3, 0.2));
        let h = coupled_hamiltonian(&p, &a, &b);
        let h0 = coupled_hamiltonian(&p.with_coupling(0.0), &a, &b);
        let diff = h - h0;
        // n₁ = 0 block (control |↑⟩) carries no interaction
        assert!(diff.block(0, 2).max_abs() < 1e-15);
        // n₁ = 1 block: Δ(N₂ - n_{x,2}) = -½Δσ_z + Δ(½ - n_{x,2})I
        let expected = pauli::z().scale_real(-0.35) + pauli::identity().scale_real(0.7 * (0.5 - 0.3));
        assert!(diff.block(2, 2).max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn symmetric_bias_interaction_is_zz() {
        let p = DeviceParams::new(1.0, 50.0, 0.9).unwrap();
        let (a, b) = (seg(0.5, 0.5), seg(0.5, 0.5));
        let h = coupled_hamiltonian(&p, &a, &b);
        let zz = kron(&pauli::z(), &pauli::z()).unwrap().scale_real(0.9 / 4.0);
        assert!(h.max_abs_diff(&zz) < 1e-15);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn schedule_hamiltonians_single_and_two_qubit() {
        let p = DeviceParams::default();
        let s = Schedule::single(vec![ControlSegment::new(0.48, 0.0, 0.7).unwrap()]);
        let hs = schedule_hamiltonians(&p, &s).unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].duration, 0.7);

        let q1 = [ControlSegment::new(0.0, 0.5, 1.0).unwrap()];
        let q2 = [ControlSegment::new(0.5, 0.5, 0.25).unwrap(), ControlSegment::new(0.4, 0.0, 0.75).unwrap()];
        let merged = Schedule::merged(&q1, &q2, false).unwrap();
        assert_eq!(merged.qubit1.len(), 2);
        let hs = schedule_hamiltonians(&p, &merged).unwrap();
        assert_eq!(hs.len(), 2);
        let id = pauli::identity();
        let expected = kron(&two_level_hamiltonian(&p, &q1[0]), &id).unwrap() + kron(&id, &two_level_hamiltonian(&p, &q2[1])).unwrap();
        assert_eq!(hs[1].hamiltonian, expected);
        assert!((hs[1].duration - 0.75).abs() < 1e-15);
    }

    #[test]
    fn misaligned_grids_are_rejected() {
        let p = DeviceParams::default();
        let s = Schedule {
            qubit1: vec![ControlSegment::new(0.0, 0.5, 1.0).unwrap()],
            qubit2: vec![ControlSegment::new(0.5, 0.5, 0.4).unwrap()],
            coupling_on: true,
        };
        let err = schedule_hamiltonians(&p, &s).unwrap_err();
        assert!(err.to_string().starts_with("misaligned schedule"));
        assert!(Schedule::merged(&s.qubit1, &s.qubit2, true).is_err());
    }

    #[test]
    fn params_validation_and_warnings() {
        assert!(DeviceParams::new(0.0, 50.0, 1.0).is_err());
        assert!(DeviceParams::new(1.0, -1.0, 1.0).is_err());
        assert!(DeviceParams::new(1.0, 50.0, -0.1).is_err());
        assert!(DeviceParams::default().warnings().is_empty());
        assert_eq!(DeviceParams::new(15.0, 50.0, 10.0).unwrap().warnings().len(), 2);
    }

    #[test]
    fn pair_number_counts_down_as_one_pair() {
        let n = pair_number();
        assert_eq!(n, Operator::diagonal(&[Complex64::from(0.0), Complex64::from(1.0)]));
    }
}
