use thiserror::Error;

/// Errors raised by the numerical kernel, the distribution, and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WgedError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (estimate {estimate:e}, error bound {error_bound:e})")]
    Convergence {
        what: String,
        estimate: f64,
        error_bound: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid censoring scheme: {0}")]
    Scheme(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("loss domain error: {0}")]
    LossDomain(String),

    #[error("numerical integrity error: {0}")]
    NumericalIntegrity(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<WgedError>,
    },
}

impl WgedError {
    pub fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    /// Attaches a location (an integration point, a replication index, ...) to an error.
    pub fn context(self, context: impl Into<String>) -> Self {
        Self::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context layers stripped.
    pub fn root(&self) -> &WgedError {
        match self {
            Self::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Self::Convergence { .. } | Self::NumericalIntegrity(_)
        )
    }
}

pub type Result<T, E = WgedError> = std::result::Result<T, E>;
