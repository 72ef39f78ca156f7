use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("malformed matrix: {0}")]
    Shape(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("not a partial isometry (defect {defect:e})")]
    NotPartialIsometry { defect: f64 },

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("element does not lie in the algebra (residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("operation requires a block upper-triangular algebra")]
    RequiresBlockAlgebra,

    #[error("ill-posed algebra: {0}")]
    IllPosedAlgebra(String),

    #[error("algebra is not subdiagonal: {0}")]
    NotSubdiagonal(String),

    #[error("not factorable: determinant {delta:e} at or below floor {floor:e}")]
    NotFactorable { delta: f64, floor: f64 },

    #[error("subspace is not right-invariant (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("decomposition invariant violated: {0}")]
    Decomposition(String),

    #[error("exponents do not satisfy 1/p + 1/q = 1/r: {0}")]
    ExponentMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Precondition violations on otherwise well-formed input, as opposed to
    /// malformed input.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::DimensionMismatch(..)
                | Error::Shape(_)
                | Error::NonFinite
                | Error::InvalidPartition(_)
                | Error::InvalidArgument(_)
                | Error::ExponentMismatch(_)
        )
    }
}
