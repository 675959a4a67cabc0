//! Time evolution under piecewise-constant Hamiltonians (`ħ = 1`).
//!
//! Precession sign: under `H = -½ B·σ` the Bloch vector turns by the angle
//! `-|B| t` about `B̂` (clockwise when viewed from the tip of `B`), i.e.
//! `dr/dt = r × B`. Propagators are the literal `exp(-iHt)` with no global
//! phase removed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::state::{pauli, Operator, StateVector, HERMITIAN_TOLERANCE, I};

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 1001;

/// Closed-form `exp(-iHt)` for `H = -½ B·σ`:
/// `cos(|B|t/2)·I + i sin(|B|t/2)·(n̂·σ)`.
pub fn two_level_propagator(field: [f64; 3], t: f64) -> Operator {
    let magnitude = (field[0] * field[0] + field[1] * field[1] + field[2] * field[2]).sqrt();
    if magnitude == 0.0 {
        return Operator::identity(2);
    }
    let half = 0.5 * magnitude * t;
    let (s, c) = half.sin_cos();
    let axis = field.map(|b| b / magnitude);
    pauli::identity().scale_real(c) + pauli::dot(axis).scale(I * s)
}

/// `exp(-iHt)` through the eigendecomposition of a Hermitian `H`.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    let eig = HermitianEigen::new(h)?;
    Ok(eig.propagator(t))
}

/// Spectral decomposition `H = V diag(λ) V†`, reusable for many times.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn new(h: &Operator) -> Result<Self> {
        let tol = HERMITIAN_TOLERANCE * h.max_abs().max(1.0);
        if !h.is_hermitian(tol) {
            return Err(contract("matrix exponential needs a Hermitian operator"));
        }
        let eig = h.matrix().clone().symmetric_eigen();
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn propagator(&self, t: f64) -> Operator {
        let phases = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        );
        let m = &self.vectors * DMatrix::from_diagonal(&phases) * self.vectors.adjoint();
        Operator::from_matrix(m).expect("finite propagator")
    }
}

/// A Hamiltonian held constant for `duration`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedHamiltonian {
    pub hamiltonian: Operator,
    pub duration: f64,
}

impl TimedHamiltonian {
    pub fn new(hamiltonian: Operator, duration: f64) -> Self {
        Self { hamiltonian, duration }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    ClosedForm,
    Rk4,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            "rk4" => Ok(Method::Rk4),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: StateVector,
    /// Index of the segment whose Hamiltonian drove the interval ending at
    /// this sample (the first sample belongs to segment 0).
    pub segment: usize,
}

/// Time-ordered samples of an evolution with the Hamiltonians that drove it.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    hamiltonians: Vec<Operator>,
}

impl Trajectory {
    /// Builds a trajectory, checking normalization (1e-10) and strictly
    /// increasing times starting at zero.
    pub fn new(samples: Vec<Sample>, hamiltonians: Vec<Operator>) -> Result<Self> {
        if samples.is_empty() {
            return Err(contract("trajectory needs at least one sample"));
        }
        if samples[0].t != 0.0 {
            return Err(contract("trajectory must start at t = 0"));
        }
        for w in samples.windows(2) {
            if w[1].t <= w[0].t {
                return Err(contract(format!("sample times not increasing at t = {}", w[1].t)));
            }
        }
        for s in &samples {
            if (s.state.norm() - 1.0).abs() > 1e-10 {
                return Err(contract(format!("state at t = {} is not normalized", s.t)));
            }
            if s.segment >= hamiltonians.len() {
                return Err(contract("sample refers to a missing segment"));
            }
        }
        Ok(Self { samples, hamiltonians })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn hamiltonians(&self) -> &[Operator] {
        &self.hamiltonians
    }

    pub fn hamiltonian(&self, index: usize) -> &Operator {
        &self.hamiltonians[self.samples[index].segment]
    }

    pub fn initial(&self) -> &StateVector {
        &self.samples[0].state
    }

    pub fn final_state(&self) -> &StateVector {
        &self.samples[self.samples.len() - 1].state
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Same times and Hamiltonians with replaced states.
    pub fn with_states(&self, states: Vec<StateVector>) -> Result<Self> {
        if states.len() != self.samples.len() {
            return Err(contract("state count does not match sample count"));
        }
        let samples = self
            .samples
            .iter()
            .zip(states)
            .map(|(s, state)| Sample { t: s.t, state, segment: s.segment })
            .collect();
        Trajectory::new(samples, self.hamiltonians.clone())
    }
}

/// Evolves `initial` through the segments, sampling each segment uniformly
/// at `samples_per_segment` points (shared boundary points are stored once).
///
/// `ClosedForm` evaluates the exact segment propagator at every sample time;
/// `Rk4` takes one classical Runge-Kutta step per sample interval and
/// renormalizes after each step.
pub fn evolve_schedule(
    segments: &[TimedHamiltonian],
    initial: &StateVector,
    samples_per_segment: usize,
    method: Method,
) -> Result<Trajectory> {
    if segments.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if samples_per_segment < 2 {
        return Err(contract("samples_per_segment must be at least 2"));
    }
    for seg in segments {
        if !(seg.duration > 0.0 && seg.duration.is_finite()) {
            return Err(contract(format!("segment duration {} must be positive", seg.duration)));
        }
        if seg.hamiltonian.dim() != initial.dim() {
            return Err(contract("Hamiltonian and state dimensions differ"));
        }
    }

    let steps = samples_per_segment - 1;
    let mut samples = Vec::with_capacity(segments.len() * steps + 1);
    samples.push(Sample { t: 0.0, state: initial.clone(), segment: 0 });
    let mut t0 = 0.0;
    let mut psi = initial.clone();

    for (index, seg) in segments.iter().enumerate() {
        let dt = seg.duration / steps as f64;
        match method {
            Method::ClosedForm => {
                let eig = HermitianEigen::new(&seg.hamiltonian)?;
                let start = psi.clone();
                for k in 1..=steps {
                    let local = if k == steps { seg.duration } else { k as f64 * dt };
                    psi = renormalize(eig.propagator(local).apply(&start));
                    samples.push(Sample { t: t0 + local, state: psi.clone(), segment: index });
                }
            }
            Method::Rk4 => {
                let h = seg.hamiltonian.matrix();
                for k in 1..=steps {
                    psi = renormalize(rk4_step(h, &psi, dt));
                    let local = if k == steps { seg.duration } else { k as f64 * dt };
                    samples.push(Sample { t: t0 + local, state: psi.clone(), segment: index });
                }
            }
        }
        t0 += seg.duration;
    }

    let hamiltonians = segments.iter().map(|s| s.hamiltonian.clone()).collect();
    Trajectory::new(samples, hamiltonians)
}

/// Final state only, without storing samples.
pub fn evolve_final(
    segments: &[TimedHamiltonian],
    initial: &StateVector,
    samples_per_segment: usize,
    method: Method,
) -> Result<StateVector> {
    match method {
        Method::ClosedForm => {
            let u = schedule_propagator(segments)?;
            if u.dim() != initial.dim() {
                return Err(contract("Hamiltonian and state dimensions differ"));
            }
            Ok(u.apply(initial))
        }
        Method::Rk4 => {
            Ok(evolve_schedule(segments, initial, samples_per_segment, method)?.final_state().clone())
        }
    }
}

/// Time-ordered product of the segment propagators.
pub fn schedule_propagator(segments: &[TimedHamiltonian]) -> Result<Operator> {
    let first = segments.first().ok_or(Error::EmptySchedule)?;
    let mut u = Operator::identity(first.hamiltonian.dim());
    for seg in segments {
        if seg.duration < 0.0 || !seg.duration.is_finite() {
            return Err(contract(format!("segment duration {} must be non-negative", seg.duration)));
        }
        u = expm_hermitian(&seg.hamiltonian, seg.duration)? * u;
    }
    Ok(u)
}

fn rk4_step(h: &DMatrix<Complex64>, psi: &StateVector, dt: f64) -> StateVector {
    let minus_i = Complex64::new(0.0, -1.0);
    let f = |v: &DVector<Complex64>| (h * v) * minus_i;
    let y = psi.vector();
    let half = Complex64::from(0.5 * dt);
    let full = Complex64::from(dt);
    let k1 = f(y);
    let k2 = f(&(y + &k1 * half));
    let k3 = f(&(y + &k2 * half));
    let k4 = f(&(y + &k3 * full));
    let next = y + (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
    StateVector::from_vector_unchecked(next)
}

fn renormalize(psi: StateVector) -> StateVector {
    let n = psi.norm();
    StateVector::from_vector_unchecked(psi.vector() / Complex64::from(n))
}
