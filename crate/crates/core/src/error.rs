use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} must be even")]
    OddCopies { name: &'static str, value: u64 },

    #[error("output copies M = {m} must be at least the input copies N = {n}")]
    TooFewOutputs { n: u64, m: u64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{qubits} qubits exceeds the dense simulation limit of {limit}")]
    DenseLimit { qubits: u64, limit: u64 },

    #[error("gate is not unitary (|U^dag U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("no feasible plan: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_even(name: &'static str, value: u64) -> Result<()> {
    if value % 2 != 0 {
        return Err(Error::OddCopies { name, value });
    }
    Ok(())
}

pub(crate) fn require_outputs(n: u64, m: u64) -> Result<()> {
    if m < n {
        return Err(Error::TooFewOutputs { n, m });
    }
    Ok(())
}
