use thiserror::Error;

/// Errors produced by the `essq` library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock cutoff: {0}")]
    InvalidCutoff(String),

    #[error("mixture weights are not normalizable: {0}")]
    InvalidMixture(String),

    #[error("beam-splitter coefficients are not unitary: |T|^2 + |R|^2 = {0}")]
    NonUnitary(f64),

    #[error("direction vector must be nonzero and finite")]
    ZeroVector,

    #[error("argument outside the valid domain: {0}")]
    Domain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("quadrature did not converge: {0}")]
    NotConverged(String),

    #[error("negative probability {value:e} at cell ({i}, {j}); increase the Fock cutoff")]
    NegativeProbability { i: usize, j: usize, value: f64 },

    #[error("distribution is not normalized (sum = {0})")]
    NotNormalized(f64),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("no samples")]
    EmptySamples,

    #[error("{0} APDs per arm exceeds the supported maximum of {max}", max = crate::tolerance::MAX_APDS)]
    TooManyDetectors(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("inverse transform left an imaginary residue of {0:e} relative to the peak")]
    ImaginaryResidue(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotConverged(_)
                | Error::NegativeProbability { .. }
                | Error::ImaginaryResidue(_)
                | Error::NotHermitian(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
