use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// Array shapes do not match the algebra dimension.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Antisymmetry or Jacobi failed.
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("dimension {found} is below the required minimum {required}")]
    Dimension { found: usize, required: usize },

    /// Two independent computations of the same quantity disagree. This always
    /// indicates a bug and is never silently swallowed.
    #[error("consistency check failed for {what}: discrepancy {discrepancy:.3e} exceeds {tolerance:.3e}")]
    Consistency {
        what: String,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("not almost abelian: {0}")]
    NotAlmostAbelian(String),

    #[error("invalid ideal hint: {0}")]
    Hint(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("classification: {0}")]
    Classification(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl GeomError {
    /// True for errors caused by malformed or out-of-range input, as opposed to
    /// a mathematical verdict about a well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            GeomError::Shape(_)
                | GeomError::NonFinite(_)
                | GeomError::InvalidAlgebra(_)
                | GeomError::Metric(_)
                | GeomError::Hint(_)
                | GeomError::Input(_)
        )
    }

    pub(crate) fn consistency(what: impl Into<String>, discrepancy: f64, tolerance: f64) -> Self {
        GeomError::Consistency {
            what: what.into(),
            discrepancy,
            tolerance,
        }
    }
}
