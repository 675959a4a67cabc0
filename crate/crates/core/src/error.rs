use thiserror::Error;

/// Errors produced by the simulator.
///
/// `ContractViolation` marks a broken numeric precondition (wrong dimension,
/// non-Hermitian input, non-unitary gate). Everything else is a rejected
/// input or a protocol that cannot be analysed as requested.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty schedule")]
    EmptySchedule,

    #[error("misaligned schedule: segment boundaries of the two qubits differ at {time}")]
    MisalignedSchedule { time: f64 },

    #[error("non-cyclic trajectory (defect {defect:e})")]
    NonCyclic { defect: f64 },

    #[error("undersampled trajectory: consecutive overlap {overlap} at sample {index}")]
    Undersampled { index: usize, overlap: f64 },

    #[error("ambiguous geodesic between antipodal points at index {index}")]
    AmbiguousGeodesic { index: usize },

    #[error("unreachable phase {0}: target must lie in (0, pi)")]
    UnreachablePhase(f64),

    #[error("no coupling: two-qubit gate needs delta_coupling > 0")]
    NoCoupling,
}

impl Error {
    /// True for broken numeric contracts, as opposed to bad user input.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::ContractViolation(_)
                | Error::NonCyclic { .. }
                | Error::Undersampled { .. }
                | Error::AmbiguousGeodesic { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}
