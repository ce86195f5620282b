use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A state that must be normalized is not.
    #[error("state is not normalized (squared norm {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    /// Evolution would push population above the highest retained Fock level.
    #[error("truncation leak: amplitude {amplitude:e} on the top rung n_max = {n_max}")]
    TruncationLeak { amplitude: f64, n_max: usize },

    #[error("non-finite amplitude in state")]
    NonFinite,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
