use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown point label `{0}`")]
    UnknownLabel(String),

    #[error("transport problem does not sum to zero (sum = {0})")]
    NotZeroSum(Rational),

    #[error("input is not a metric: {0}")]
    NotAMetric(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("malformed rational `{0}`")]
    ParseRational(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// A postcondition that should hold by construction did not.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI error channel.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnknownLabel(_) => "unknown_label",
            Error::NotZeroSum(_) => "not_zero_sum",
            Error::NotAMetric(_) => "not_a_metric",
            Error::InvalidTree(_) => "invalid_tree",
            Error::ParseRational(_) => "parse_rational",
            Error::Malformed(_) => "malformed_input",
            Error::ResourceLimit(_) => "resource_limit",
            Error::Invariant(_) => "invariant_violation",
        }
    }
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(format!($($arg)*))
    };
}
pub(crate) use invalid;
