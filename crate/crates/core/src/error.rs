use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenposError {
    /// A numeric input lies outside the region where the construction is defined.
    #[error("{field}: {message}")]
    Domain { field: String, message: String },

    /// A structural precondition failed (comparable words, equal indices, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A hypothesis of one of the certificate presets does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("bracket [{lo}, {hi}] does not straddle the target")]
    Bracket { lo: f64, hi: f64 },

    #[error("dimension equation is not monotone on [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },

    /// The witness search does not apply because the logarithm ratio is rational.
    #[error("log-ratio {value} is rational ({num}/{den}); witnesses need not exist")]
    RationalLogRatio { value: f64, num: i64, den: i64 },

    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}

impl GenposError {
    pub(crate) fn domain(field: impl Into<String>, message: impl Into<String>) -> Self {
        GenposError::Domain {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GenposError>;
