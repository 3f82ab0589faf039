//! Error taxonomy shared by the whole crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Matrix/vector dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A matrix expected to be Hermitian (or symmetric) is not, beyond tolerance.
    #[error("matrix is not Hermitian: {0}")]
    NonHermitian(String),

    /// A beamformer is numerically orthogonal to some device channel, so the
    /// effective gain cannot be inverted.
    #[error("degenerate channel: beamformer has (near-)zero gain on device {device}")]
    DegenerateChannel { device: usize },

    /// The MSE is unbounded for this beamformer (some effective gain is zero).
    /// Distinguished from a crash so sweeps can record the failure explicitly.
    #[error("infinite MSE: beamformer has zero minimum gain")]
    InfiniteMse,

    /// An internal convex solver failed to produce a usable certificate.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// Gaussian randomization produced no feasible candidate.
    #[error("extraction failure: {0}")]
    ExtractionFailure(String),

    /// Configuration text could not be parsed or failed validation.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    ConfigParse { line: Option<usize>, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::ConfigParse { line, message: message.into() }
    }

    /// Short machine-friendly tag used in experiment record status columns.
    pub fn status_tag(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DimensionMismatch(_) => "dimension-mismatch",
            Error::NonHermitian(_) => "non-hermitian",
            Error::DegenerateChannel { .. } => "degenerate-channel",
            Error::InfiniteMse => "infinite-mse",
            Error::SolverFailure(_) => "solver-failure",
            Error::ExtractionFailure(_) => "extraction-failure",
            Error::ConfigParse { .. } => "config-error",
            Error::Io { .. } => "io-error",
        }
    }
}
