//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown variable `{name}` at byte {position} (polynomial has {n_vars} variables)")]
    UnknownVariable {
        name: String,
        position: usize,
        n_vars: usize,
    },

    #[error("exponent overflow at byte {position}: {detail}")]
    ExponentOverflow { position: usize, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range 1..={n_vars}")]
    IndexOutOfRange { index: usize, n_vars: usize },

    #[error("work budget exceeded: {required} units required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error(
        "factorization gave up on a {bits}-bit value after {iterations} iterations{}",
        point_suffix(point)
    )]
    FactorizationTimeout {
        bits: u64,
        iterations: u64,
        /// The lattice point whose value timed out, when known.
        point: Option<Vec<i64>>,
    },

    #[error("polynomial is identically zero modulo {p}")]
    DegenerateModP { p: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn point_suffix(point: &Option<Vec<i64>>) -> String {
    match point {
        Some(p) => format!(" (at point {p:?})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code contract used by the CLI: 2 invariant violation,
    /// 3 budget/timeout, 4 config or input error.
    /// Attach the offending lattice point to a factorization timeout.
    pub(crate) fn at_point(self, pt: &[i64]) -> Error {
        match self {
            Error::FactorizationTimeout {
                bits,
                iterations,
                point: None,
            } => Error::FactorizationTimeout {
                bits,
                iterations,
                point: Some(pt.to_vec()),
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::FactorizationTimeout { .. } => 3,
            _ => 4,
        }
    }
}
