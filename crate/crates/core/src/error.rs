use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Exact arithmetic would leave the supported range (q too large).
    #[error("arithmetic capacity exceeded: {0}")]
    Capacity(String),

    #[error("illegal question {question} for state {state}")]
    IllegalQuestion { state: String, question: String },

    #[error("shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// The solver refused or aborted because the work estimate exceeded the budget.
    #[error("budget exceeded in {dimension}: estimate {estimate} > budget {budget}")]
    BudgetExceeded {
        dimension: &'static str,
        estimate: u128,
        budget: u128,
    },

    /// A documented precondition does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("strategy inapplicable: {0}")]
    StrategyInapplicable(String),

    #[error("no move available from the zero state")]
    NoMove,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn capacity(what: impl std::fmt::Display) -> Self {
        Error::Capacity(what.to_string())
    }
}
