use thiserror::Error;

/// Errors raised by state construction, protocol execution and derivation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller violated an interface contract (bad labels, wrong lengths,
    /// out-of-range indices, degenerate inputs).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Amplitudes do not form a unit vector.
    #[error("state is not normalized: |norm - 1| = {deviation:.3e} exceeds tolerance")]
    NotNormalized { deviation: f64 },

    /// A gate matrix failed the unitarity check.
    #[error("matrix is not unitary within tolerance")]
    NonUnitary,

    /// The input state is outside the family an operation supports.
    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    /// No Pauli correction exists for some measurement outcome; the
    /// channel/plan pairing cannot realize the protocol.
    #[error("protocol infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
