use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input (empty itemset, oversized element, ...).
    #[error("input error: {0}")]
    Input(String),

    /// Instance file that does not follow the schema. `pointer` is a JSON pointer.
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Enumeration stopped at the budget before any usable result was found.
    #[error("budget of {budget} plans exhausted after {evaluated} evaluations without a feasible plan")]
    BudgetExhausted { budget: u64, evaluated: u64 },

    /// Instance too large for an exhaustive routine.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
