use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A factoradic value with an unknown tail does not carry enough digits.
    #[error("insufficient depth: need depth >= {required}, have {available}")]
    InsufficientDepth { required: usize, available: usize },

    /// A big integer would exceed the configured bit budget.
    #[error("bit budget exceeded: {needed} bits needed, budget is {budget}")]
    BitBudget { needed: u64, budget: u64 },

    #[error("digit {digit} at position {position} is out of range 0..={max}")]
    DigitOutOfRange { position: usize, digit: u64, max: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("value is not in the cylinder support: {0}")]
    Membership(String),

    #[error("prefix too short: need {needed} coefficients, have {available}")]
    InsufficientPrefix { needed: usize, available: usize },

    #[error("({preperiod}, {period}) is not an ultimate period of the prefix")]
    InvalidPeriod { preperiod: usize, period: usize },

    #[error("unknown {kind} `{name}`; known: {known}")]
    UnknownName { kind: &'static str, name: String, known: String },

    #[error("cannot sample a non-zero point: {0}")]
    EmptySample(String),
}
