use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: series did not converge after {terms} terms (partial sum {partial_sum:e})")]
    Convergence {
        op: &'static str,
        partial_sum: f64,
        terms: usize,
    },

    #[error(
        "{op}: tolerance not met after {refinements} refinements \
         (best value {value:e}, error estimate {err_est:e})"
    )]
    Accuracy {
        op: &'static str,
        value: f64,
        err_est: f64,
        refinements: usize,
    },

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    /// True for the two numerical failure kinds (series or quadrature).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Accuracy { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
