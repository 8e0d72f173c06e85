//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors that must agree in dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A NaN or infinity was produced or supplied where a finite value is required.
    /// `iteration` is set when the failure happened inside an optimizer run.
    #[error("non-finite value in {context}{}", iteration.map(|t| format!(" at iteration {t}")).unwrap_or_default())]
    NonFinite {
        context: String,
        iteration: Option<u64>,
    },

    /// An iterate escaped the divergence guard.
    #[error("divergence at iteration {iteration}: {detail}")]
    Divergence { iteration: u64, detail: String },

    /// A constructor or operation received an out-of-range parameter.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Not enough usable data to estimate or fit anything.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A statistical check was requested on an oracle whose bias makes it meaningless.
    #[error("oracle is biased ({0}); unbiasedness checks are not applicable")]
    BiasedOracle(String),

    /// A finite stepsize list was queried past its end.
    #[error("schedule exhausted: index {index} out of {len} entries")]
    ScheduleExhausted { index: u64, len: usize },

    /// A state-dependent schedule cannot be evaluated as a pure function of t.
    #[error("adaptive schedule has no closed-form gamma(t); it is produced by the optimizer")]
    AdaptiveSchedule,

    /// Malformed config file or schedule string.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure while reading or writing artifacts.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>, iteration: Option<u64>) -> Self {
        Error::NonFinite {
            context: context.into(),
            iteration,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
