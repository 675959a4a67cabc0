//! State vectors, dense operators and the Bloch-sphere map.
//!
//! Basis conventions used throughout the crate:
//!
//! * one qubit: `(|↑⟩, |↓⟩)`, so `σ_z = diag(1, -1)`;
//! * two qubits: `(|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩)` with qubit 1 (the control) as the
//!   left tensor factor.
//!
//! In the charge picture `|↑⟩` is the zero-Cooper-pair state and `|↓⟩` holds
//! one extra pair, so the two-qubit order above is the charge order
//! `(00, 01, 10, 11)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const UNITARY_TOLERANCE: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Wraps amplitudes that must already be normalized (within 1e-12).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        check_finite(v.iter())?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(contract(format!("state norm {norm} is not 1")));
        }
        Ok(Self(v))
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        check_finite(v.iter())?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(contract("cannot normalize the zero vector"));
        }
        Ok(Self(v / Complex64::from(norm)))
    }

    pub(crate) fn from_vector_unchecked(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    /// Computational basis vector `k` of a `dim`-dimensional space.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut v = DVector::from_element(dim, ZERO);
        v[k] = ONE;
        Self(v)
    }

    pub fn up() -> Self {
        Self::basis(2, 0)
    }

    pub fn down() -> Self {
        Self::basis(2, 1)
    }

    /// `+1` eigenstate of `σ_y`: `(|↑⟩ + i|↓⟩)/√2`.
    pub fn plus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]))
    }

    /// `-1` eigenstate of `σ_y`: `(|↑⟩ - i|↓⟩)/√2`.
    pub fn minus_y() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, -s)]))
    }

    /// `+1` eigenstate of `σ_x`.
    pub fn plus_x() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(DVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]))
    }

    /// Single-qubit state from complex amplitudes on `|↑⟩` and `|↓⟩`.
    pub fn qubit(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        Self(&self.0 * Complex64::from_polar(1.0, phi))
    }

    /// Bloch vector of the reduced state of `qubit` (0 = left factor) of a
    /// two-qubit state. Its length is below one for entangled states.
    pub fn reduced_bloch(&self, qubit: usize) -> Result<BlochVector> {
        if self.dim() != 4 || qubit > 1 {
            return Err(contract("reduced_bloch needs a two-qubit state and qubit 0 or 1"));
        }
        let a = &self.0;
        // rho[i][j] of the reduced 2x2 density matrix
        let mut rho = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    let (ii, jj) = if qubit == 0 { (2 * i + k, 2 * j + k) } else { (2 * k + i, 2 * k + j) };
                    acc += a[ii] * a[jj].conj();
                }
                rho[i][j] = acc;
            }
        }
        Ok(BlochVector {
            x: 2.0 * rho[1][0].re,
            y: 2.0 * rho[1][0].im,
            z: (rho[0][0] - rho[1][1]).re,
        })
    }
}

/// Dense square operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator(DMatrix<Complex64>);

impl Operator {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(contract(format!("operator must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        check_finite(m.iter())?;
        Ok(Self(m))
    }

    /// Row-major construction.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(contract(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        Self::from_matrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::from(x)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::from_element(dim, dim, ZERO))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::from(s))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.dim(), state.dim(), "dimension mismatch");
        StateVector(&self.0 * &state.0)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Complex64 {
        state.0.dotc(&(&self.0 * &state.0))
    }

    /// Square sub-block `[start, start + size)` on both axes.
    pub fn block(&self, start: usize, size: usize) -> Operator {
        Self(self.0.view((start, start), (size, size)).into_owned())
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl<'a> Mul<&'a Operator> for Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator(self.0 + rhs.0)
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator(self.0 - rhs.0)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub mod pauli {
    //! Pauli matrices in the `(|↑⟩, |↓⟩)` basis.
    use super::*;

    pub fn identity() -> Operator {
        Operator::identity(2)
    }

    pub fn x() -> Operator {
        Operator(DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
    }

    pub fn y() -> Operator {
        Operator(DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]))
    }

    pub fn z() -> Operator {
        Operator(DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]))
    }

    /// `v·σ` for a real 3-vector.
    pub fn dot(v: [f64; 3]) -> Operator {
        Operator(DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(v[2], 0.0),
                Complex64::new(v[0], -v[1]),
                Complex64::new(v[0], v[1]),
                Complex64::new(-v[2], 0.0),
            ],
        ))
    }
}

/// Tensor product `a ⊗ b` of two single-qubit operators, `a` acting on the
/// left (control) factor.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(contract(format!("kron expects 2x2 factors, got {} and {}", a.dim(), b.dim())));
    }
    Ok(Operator(a.0.kronecker(&b.0)))
}

/// Bloch-sphere coordinates `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn distance(self, o: BlochVector) -> f64 {
        self.add(o.scale(-1.0)).norm()
    }

    /// Right-handed rotation by `angle` about the unit vector `axis`
    /// (Rodrigues' formula).
    pub fn rotated(self, axis: BlochVector, angle: f64) -> BlochVector {
        let (s, c) = angle.sin_cos();
        self.scale(c)
            .add(axis.cross(self).scale(s))
            .add(axis.scale(axis.dot(self) * (1.0 - c)))
    }
}

/// Pauli-expectation map of a single-qubit state.
pub fn bloch_from_state(state: &StateVector) -> Result<BlochVector> {
    if state.dim() != 2 {
        return Err(contract(format!("bloch_from_state needs dim 2, got {}", state.dim())));
    }
    let a = state.0[0];
    let b = state.0[1];
    // ⟨σ_x⟩ + i⟨σ_y⟩ = 2 a* b
    let c = a.conj() * b * 2.0;
    Ok(BlochVector::new(c.re, c.im, a.norm_sqr() - b.norm_sqr()))
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a Complex64>) -> Result<()> {
    if it.all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(contract("non-finite entry"))
    }
}
