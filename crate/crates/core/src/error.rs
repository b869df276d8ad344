use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("symbol `{name}` used with arity {found}, but declared with arity {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("head variables must occur in the body: {0}")]
    HeadVarNotInBody(String),

    #[error("not a unary flow: {0}")]
    NotUnary(String),

    #[error("precondition `{invariant}` violated: {detail}")]
    Precondition {
        invariant: &'static str,
        detail: String,
    },

    #[error("{what} needs {needed} elements, over the budget of {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("flow #{index} is not a balanced observation with stack: {reason}")]
    Observation { index: usize, reason: String },

    #[error("automaton: {0}")]
    Automaton(String),

    #[error("circuit: {0}")]
    Circuit(String),

    #[error("query: {0}")]
    Query(String),

    #[error("word representation: {0}")]
    WordRep(String),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    pub(crate) fn precondition(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            invariant,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
