//! Non-adiabatic geometric phases in symmetric-SQUID charge qubits.
//!
//! The crate models a Cooper-pair box in the two-level charge basis
//! (`|↑⟩` = no excess pair, `|↓⟩` = one pair) with `ħ = 1` and
//! `H = -½ B·σ`, `B = (E_J, 0, E_ch(1 - 2n_x))`, `E_J = 2E_J0 cos(πf)`.
//! On top of the evolution engine it provides the phase decomposition
//! (total, dynamic, geometric and the Bloch solid angle), the single-qubit
//! cyclic protocol with its calibration, the conditional two-qubit gate,
//! a CNOT score up to local z phases, and a charge-basis validity check.

pub mod device;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod phase;
pub mod protocol;
pub mod state;

pub use device::{ControlSegment, DeviceParams, Schedule};
pub use error::{Error, Result};
pub use evolution::{Method, Trajectory, DEFAULT_SAMPLES_PER_SEGMENT};
pub use exec::Execution;
pub use num_complex::Complex64;
pub use phase::{wrap_phase, PhaseReport};
pub use state::{BlochVector, Operator, StateVector};
