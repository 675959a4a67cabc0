//! Gate scores up to single-qubit z-phase corrections.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{contract, Result};
use crate::exec::Execution;
use crate::state::{Operator, ONE, ZERO};

/// Grid resolution per phase axis before local refinement.
pub const PHASE_GRID_POINTS: usize = 721;
const REFINE_TOLERANCE: f64 = 1e-10;
const UNITARY_GATE_TOLERANCE: f64 = 1e-9;

/// CNOT with qubit 1 as control, flipping the target when the control box
/// holds a Cooper pair (`|↓⟩`): `diag(I, σ_x)` in the crate's basis order.
pub fn cnot() -> Operator {
    Operator::from_rows(
        4,
        &[
            ONE, ZERO, ZERO, ZERO, //
            ZERO, ONE, ZERO, ZERO, //
            ZERO, ZERO, ZERO, ONE, //
            ZERO, ZERO, ONE, ZERO,
        ],
    )
    .expect("4x4")
}

/// `max |tr(T† (e^{iφ₁σ_z} ⊗ e^{iφ₂σ_z}) U)| / 4` over both phases; the
/// modulus absorbs the global phase.
pub fn phase_corrected_fidelity(target: &Operator, u: &Operator, exec: Execution) -> Result<f64> {
    if target.dim() != 4 || u.dim() != 4 {
        return Err(contract("phase-corrected fidelity compares 4x4 gates"));
    }
    if !u.is_unitary(UNITARY_GATE_TOLERANCE) {
        return Err(contract(format!("gate is not unitary (defect {:e})", u.unitarity_defect())));
    }
    // tr(T† C U) = Σ_k C_kk (U T†)_kk for diagonal C
    let ut = u * &target.adjoint();
    let d: [Complex64; 4] = std::array::from_fn(|k| ut.get(k, k));
    let objective = |p1: f64, p2: f64| score(&d, p1, p2);

    let n = PHASE_GRID_POINTS;
    let step = PI / (n - 1) as f64;
    let rows: Vec<usize> = (0..n).collect();
    let per_row = exec.map(&rows, |&i| {
        let p1 = -PI / 2.0 + i as f64 * step;
        (0..n)
            .map(|j| {
                let p2 = -PI / 2.0 + j as f64 * step;
                (objective(p1, p2), p1, p2)
            })
            .fold((f64::NEG_INFINITY, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a })
    });
    let (mut best, mut p1, mut p2) = per_row
        .into_iter()
        .fold((f64::NEG_INFINITY, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });

    // compass search from the best grid point
    let mut h = step;
    while h > REFINE_TOLERANCE {
        let mut improved = false;
        for (dp1, dp2) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = objective(p1 + dp1, p2 + dp2);
            if v > best {
                best = v;
                p1 += dp1;
                p2 += dp2;
                improved = true;
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best.clamp(0.0, 1.0))
}

fn score(d: &[Complex64; 4], p1: f64, p2: f64) -> f64 {
    let a = Complex64::from_polar(1.0, p1);
    let b = Complex64::from_polar(1.0, p2);
    // σ_z eigenvalues: control (+,+,-,-), target (+,-,+,-)
    let sum = a * (b * d[0] + b.conj() * d[1]) + a.conj() * (b * d[2] + b.conj() * d[3]);
    sum.norm() / 4.0
}

pub fn cnot_fidelity(u: &Operator) -> Result<f64> {
    phase_corrected_fidelity(&cnot(), u, Execution::default())
}

/// Control-side phase `diag(1, 1, -i, -i)` that turns `diag(I, M(π/2))`
/// into CNOT.
///
/// No local completion exists for other angles: the score of
/// `diag(I, M(γ))` is `(1 + |sin γ|) / 2`, so `|γ| = π/4` stops at
/// `(2 + √2) / 4`.
pub fn cnot_completion() -> Operator {
    let m = Complex64::new(0.0, -1.0);
    Operator::diagonal(&[ONE, ONE, m, m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::two_qubit::target_gate;

    #[test]
    fn cnot_scores_one() {
        assert!((cnot_fidelity(&cnot()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_scores_one_half() {
        // |tr(CNOT† C)|/4 = |2 cos φ₂|/4 ≤ 1/2
        let f = cnot_fidelity(&Operator::identity(4)).unwrap();
        assert!((f - 0.5).abs() < 1e-12 && f < 0.8);
    }

    #[test]
    fn quarter_turn_completion_reaches_cnot() {
        let u = cnot_completion() * target_gate(PI / 2.0);
        assert!(u.max_abs_diff(&cnot()) < 1e-15);
        assert!(cnot_fidelity(&target_gate(PI / 2.0)).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn conditional_rotation_score_has_closed_form() {
        for gamma in [0.1, PI / 4.0, 1.0, PI / 2.0, 2.0, -0.7] {
            let f = cnot_fidelity(&target_gate(gamma)).unwrap();
            assert!((f - (1.0 + gamma.sin().abs()) / 2.0).abs() < 1e-12, "gamma {gamma}: {f}");
        }
    }

    #[test]
    fn local_z_phases_are_free() {
        let c = Operator::diagonal(&[
            Complex64::from_polar(1.0, 0.3 + 1.1),
            Complex64::from_polar(1.0, 0.3 - 1.1),
            Complex64::from_polar(1.0, -0.3 + 1.1),
            Complex64::from_polar(1.0, -0.3 - 1.1),
        ])
        .scale(Complex64::from_polar(1.0, 0.77));
        let f = cnot_fidelity(&(c * cnot())).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_input_is_rejected() {
        assert!(cnot_fidelity(&Operator::identity(4).scale_real(1.1)).is_err());
        assert!(cnot_fidelity(&Operator::identity(2)).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let u = target_gate(0.4);
        let a = phase_corrected_fidelity(&cnot(), &u, Execution::Sequential).unwrap();
        let b = phase_corrected_fidelity(&cnot(), &u, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
