//! Gate protocols built on the device model.

pub mod fidelity;
pub mod single;
pub mod sweep;
pub mod two_qubit;
pub mod validate;
