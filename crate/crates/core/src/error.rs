use thiserror::Error;

use crate::counter::Backend;

/// Failures of the exact counting machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("{what} needs {requested} entries, over the memory budget of {budget}")]
    BudgetExceeded { what: &'static str, requested: u128, budget: usize },

    #[error("table caps differ: {left} vs {right}")]
    CapMismatch { left: usize, right: usize },

    #[error("exact count overflowed 128 bits")]
    Overflow,

    #[error("backend `{backend}` cannot count this case ({reason}); use `{fallback}` instead")]
    BackendInapplicable { backend: Backend, reason: String, fallback: Backend },

    #[error("{0}")]
    InvalidInput(String),
}

pub type CountResult<T> = Result<T, CountError>;
