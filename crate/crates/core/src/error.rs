//! Error and validation-violation types shared across the crate.

use std::fmt;

use thiserror::Error;

/// A single validation violation. Violations are data, not failures:
/// `validate` returns a list of them and leaves it to the caller to decide
/// whether to abort.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A (state, letter) pair without a transition, or a guard set that does
    /// not tile the alphabet.
    Incomplete { state: String, detail: String },
    /// Two transitions of one state overlap on a letter.
    Nondeterministic { state: String, detail: String },
    /// A safety-flagged automaton with an edge from a priority-1 state to a
    /// priority-0 state.
    SafetyShape { from: String, to: String },
    /// A probability distribution that does not sum to 1, or an edge set
    /// inconsistent with the distribution support.
    Stochastic { state: String, detail: String },
    /// A labeled chain that is not deterministic/complete in the sense that
    /// successor labels of a state must be distinct and cover the alphabet.
    Labeling { state: String, detail: String },
    /// Anything else worth reporting (missing priorities, bad references...).
    Other { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Incomplete { state, detail } => {
                write!(f, "incomplete at state '{state}': {detail}")
            }
            Violation::Nondeterministic { state, detail } => {
                write!(f, "nondeterministic at state '{state}': {detail}")
            }
            Violation::SafetyShape { from, to } => {
                write!(f, "safety shape violated: priority-1 state '{from}' reaches priority-0 state '{to}'")
            }
            Violation::Stochastic { state, detail } => {
                write!(f, "bad distribution at state '{state}': {detail}")
            }
            Violation::Labeling { state, detail } => {
                write!(f, "bad labeling at state '{state}': {detail}")
            }
            Violation::Other { detail } => write!(f, "{detail}"),
        }
    }
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("input outside domain: {0}")]
    InputDomain(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("alphabet too large: {vars} variables ({letters} letters); the limit is 16 variables")]
    AlphabetTooLarge { vars: usize, letters: u64 },

    #[error("undefined average: {0}")]
    UndefinedAverage(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("linear program error: {0}")]
    Lp(String),

    #[error("horizon too large: {0}")]
    HorizonTooLarge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("operation cancelled")]
    Cancelled,

    #[error("JSON error: {0}")]
    Json(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
