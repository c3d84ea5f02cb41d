use thiserror::Error;

/// Coarse error category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Input,
    Precondition,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mismatched groups: {0}")]
    Mismatch(String),

    #[error("size bound exceeded: {what} = {value} > {bound}")]
    Bound { what: &'static str, value: u64, bound: u64 },

    #[error("infinite quotient: relation lattice has rank {rank} < {gens}")]
    InfiniteQuotient { rank: usize, gens: usize },

    #[error("trial cap of {cap} reached without success")]
    TrialCap { cap: u64 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Mismatch(_) => Category::Input,
            Error::Precondition(_)
            | Error::Bound { .. }
            | Error::InfiniteQuotient { .. }
            | Error::TrialCap { .. }
            | Error::NotFound(_) => Category::Precondition,
            Error::Internal(_) => Category::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
