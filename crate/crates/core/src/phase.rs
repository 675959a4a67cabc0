//! Dynamic / geometric decomposition of cyclic evolutions and the
//! Bloch-sphere solid angle of the traced loop.
//!
//! Orientation: [`solid_angle`] is positive for loops running
//! counter-clockwise when seen from outside the sphere, and the
//! Aharonov–Anandan phase of a spin-½ loop is `-ORIENTATION · Ω / 2`.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::evolution::Trajectory;
use crate::state::{bloch_from_state, BlochVector};

/// Sign `s` in `geometric = -s Ω / 2`.
pub const ORIENTATION: f64 = 1.0;

/// Minimum `|⟨ψ(0)|ψ(T)⟩|` for a trajectory to count as cyclic is `1 - CYCLICITY_TOLERANCE`.
pub const CYCLICITY_TOLERANCE: f64 = 1e-9;

/// Consecutive samples must overlap at least this much for phase tracking.
pub const MIN_STEP_OVERLAP: f64 = 0.99;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// `arg⟨ψ(0)|ψ(T)⟩` in `(-π, π]`.
    pub total_phase: f64,
    /// `-∫⟨H⟩dt`, not wrapped.
    pub dynamic_phase: f64,
    /// Unwrapped total minus dynamic phase.
    pub geometric_phase: f64,
    pub geometric_phase_wrapped: f64,
    /// `1 - |⟨ψ(0)|ψ(T)⟩|`.
    pub cyclicity_defect: f64,
}

/// `-∫₀ᵀ ⟨ψ|H|ψ⟩ dt` by the trapezoid rule. Each interval uses the
/// Hamiltonian that drove it, so the rule is exact for piecewise-constant
/// Hamiltonians.
pub fn dynamic_phase(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 2 {
        return Err(contract("dynamic phase needs at least two samples"));
    }
    let samples = traj.samples();
    let mut acc = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        let h = traj.hamiltonian(i + 1);
        let e0 = h.expectation(&w[0].state).re;
        let e1 = h.expectation(&w[1].state).re;
        acc += 0.5 * (e0 + e1) * (w[1].t - w[0].t);
    }
    Ok(-acc)
}

fn cyclic_overlap(traj: &Trajectory) -> Result<num_complex::Complex64> {
    let overlap = traj.initial().inner(traj.final_state());
    let defect = 1.0 - overlap.norm();
    if defect > CYCLICITY_TOLERANCE {
        return Err(Error::NonCyclic { defect });
    }
    Ok(overlap)
}

/// `arg⟨ψ(0)|ψ(T)⟩` of a cyclic trajectory.
pub fn total_phase(traj: &Trajectory) -> Result<f64> {
    let overlap = cyclic_overlap(traj)?;
    if overlap.norm() == 0.0 {
        return Err(Error::NonCyclic { defect: 1.0 });
    }
    Ok(wrap_phase(overlap.arg()))
}

/// Sum of `arg⟨ψᵢ|ψᵢ₊₁⟩` along the trajectory.
pub fn accumulated_phase(traj: &Trajectory) -> Result<f64> {
    let mut acc = 0.0;
    for (i, w) in traj.samples().windows(2).enumerate() {
        let o = w[0].state.inner(&w[1].state);
        if o.norm() <= MIN_STEP_OVERLAP {
            return Err(Error::Undersampled { index: i + 1, overlap: o.norm() });
        }
        acc += o.arg();
    }
    Ok(acc)
}

/// Splits the phase of a cyclic trajectory into dynamic and geometric parts.
///
/// The total phase is unwrapped onto the branch nearest the accumulated
/// step phases, then the dynamic phase is subtracted.
pub fn geometric_phase(traj: &Trajectory) -> Result<PhaseReport> {
    let overlap = cyclic_overlap(traj)?;
    let total = total_phase(traj)?;
    let dynamic = dynamic_phase(traj)?;
    let accumulated = accumulated_phase(traj)?;
    let total_unwrapped = accumulated + wrap_phase(total - accumulated);
    let geometric = total_unwrapped - dynamic;
    Ok(PhaseReport {
        total_phase: total,
        dynamic_phase: dynamic,
        geometric_phase: geometric,
        geometric_phase_wrapped: wrap_phase(geometric),
        cyclicity_defect: 1.0 - overlap.norm(),
    })
}

/// Closed path on the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochLoop {
    points: Vec<BlochVector>,
}

impl BlochLoop {
    /// At least four unit vectors (1e-8) whose first and last points agree
    /// within 1e-6.
    pub fn new(points: Vec<BlochVector>) -> Result<Self> {
        if points.len() < 4 {
            return Err(contract("a Bloch loop needs at least 4 points"));
        }
        if let Some(p) = points.iter().find(|p| (p.norm() - 1.0).abs() > 1e-8) {
            return Err(contract(format!("loop point {p:?} is not on the unit sphere")));
        }
        let gap = points[0].distance(points[points.len() - 1]);
        if gap > 1e-6 {
            return Err(contract(format!("loop is not closed (gap {gap:e})")));
        }
        Ok(Self { points })
    }

    /// Bloch path of a single-qubit trajectory.
    pub fn from_trajectory(traj: &Trajectory) -> Result<Self> {
        let points = traj.samples().iter().map(|s| bloch_from_state(&s.state)).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }
}

/// Signed solid angle enclosed by the loop, as a sum of signed spherical
/// triangles `(r, pᵢ, pᵢ₊₁)` fanned from a fixed reference point `r`.
/// The value is determined modulo `4π`; the result lies in `(-4π, 4π)`.
pub fn solid_angle(bloch_loop: &BlochLoop) -> Result<f64> {
    let pts = bloch_loop.points();
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        // |⟨a|b⟩|² = (1 + a·b)/2 for the spinor lifts
        if 0.5 * (1.0 + a.dot(b)) < 1e-12 {
            return Err(Error::AmbiguousGeodesic { index: i });
        }
    }
    let r = reference_point(pts);
    let mut omega = 0.0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let num = r.dot(a.cross(b));
        let den = 1.0 + r.dot(a) + r.dot(b) + a.dot(b);
        omega += 2.0 * num.atan2(den);
    }
    Ok(omega)
}

/// Normalized centroid when well defined, otherwise the coordinate axis
/// farthest from every antipode of the loop.
fn reference_point(pts: &[BlochVector]) -> BlochVector {
    let sum = pts.iter().fold(BlochVector::default(), |acc, p| acc.add(*p));
    let mean = sum.scale(1.0 / pts.len() as f64);
    let clearance = |r: BlochVector| pts.iter().map(|p| 1.0 + r.dot(*p)).fold(f64::INFINITY, f64::min);
    if mean.norm() > 1e-3 {
        let r = mean.scale(1.0 / mean.norm());
        if clearance(r) > 1e-3 {
            return r;
        }
    }
    let axes = [
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
    ];
    let mut best = axes[0];
    let mut best_clearance = clearance(best);
    for &a in &axes[1..] {
        let c = clearance(a);
        if c > best_clearance {
            best = a;
            best_clearance = c;
        }
    }
    best
}

/// Largest distance of any point from the best-fit plane through the
/// sphere's centre; zero for points on one great circle.
pub fn geodesic_deviation(points: &[BlochVector]) -> Result<f64> {
    if points.len() < 3 {
        return Err(contract("geodesic deviation needs at least 3 points"));
    }
    let mut scatter = Matrix3::<f64>::zeros();
    for p in points {
        let v = nalgebra::Vector3::new(p.x, p.y, p.z);
        scatter += v * v.transpose();
    }
    let eig = scatter.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("three eigenvalues");
    let normal = eig.eigenvectors.column(k);
    let normal = BlochVector::new(normal[0], normal[1], normal[2]);
    Ok(points.iter().map(|p| p.dot(normal).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseConsistency {
    pub geo_from_phase: f64,
    pub geo_from_area: f64,
    pub mismatch: f64,
}

/// Compares the geometric phase from the state's phase with `-s Ω / 2`
/// from the enclosed solid angle.
pub fn phase_consistency(traj: &Trajectory) -> Result<PhaseConsistency> {
    let report = geometric_phase(traj)?;
    let omega = solid_angle(&BlochLoop::from_trajectory(traj)?)?;
    let geo_from_area = wrap_phase(-ORIENTATION * omega / 2.0);
    let geo_from_phase = report.geometric_phase_wrapped;
    Ok(PhaseConsistency {
        geo_from_phase,
        geo_from_area,
        mismatch: wrap_phase(geo_from_phase - geo_from_area).abs(),
    })
}
