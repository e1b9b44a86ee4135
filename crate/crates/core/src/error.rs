use thiserror::Error;

/// Errors reported by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The member at infinity of the pencil is singular, so the discriminant
    /// does not have full degree.
    #[error("Q1 is singular; change coordinates on the parameter line so that the member at infinity is nonsingular")]
    SingularLeadingForm,

    #[error("singular pencil: the discriminant is not squarefree of full degree")]
    SingularPencil,

    #[error("resource bound exceeded: {0}")]
    Resource(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    /// The splitting search ran out of roots of unity in the working extension.
    #[error("extension growth required: {0}")]
    ExtensionGrowth(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
