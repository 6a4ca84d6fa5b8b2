use core::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix required to be Hermitian deviates from its adjoint.
    NotHermitian { deviation: f64 },
    /// An iterative sweep exceeded its iteration cap.
    NoConvergence { sweeps: usize },
    /// Operand shapes do not match the operation.
    DimMismatch { context: &'static str },
    /// The two basis lists do not form a dual pair (dependent or mismatched).
    NotDualPair { deviation: f64 },
    /// A Choi matrix required to be positive semidefinite is not.
    NotCompletelyPositive { min_eigenvalue: f64 },
    /// A superoperator required to be invertible is numerically singular.
    SingularTheta { rcond: f64 },
    /// An `Ad` factor is numerically singular.
    SingularAd { rcond: f64 },
    /// A vector argument is (numerically) zero.
    ZeroVector,
    /// Dimension arguments violate the operation's constraints.
    BadDims { context: &'static str },
    /// A superoperator required to preserve Hermiticity does not.
    NotHermiticityPreserving { deviation: f64 },
    /// A matrix entry is NaN or infinite.
    NonFinite { context: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:.3e})")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "iteration did not converge within {sweeps} sweeps")
            }
            Error::DimMismatch { context } => write!(f, "dimension mismatch: {context}"),
            Error::NotDualPair { deviation } => {
                write!(f, "basis lists are not a dual pair (deviation {deviation:.3e})")
            }
            Error::NotCompletelyPositive { min_eigenvalue } => {
                write!(f, "Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")
            }
            Error::SingularTheta { rcond } => {
                write!(f, "superoperator is numerically singular (rcond {rcond:.3e})")
            }
            Error::SingularAd { rcond } => {
                write!(f, "Ad factor is numerically singular (rcond {rcond:.3e})")
            }
            Error::ZeroVector => write!(f, "vector argument is zero"),
            Error::BadDims { context } => write!(f, "bad dimensions: {context}"),
            Error::NotHermiticityPreserving { deviation } => {
                write!(f, "superoperator does not preserve Hermiticity (max deviation {deviation:.3e})")
            }
            Error::NonFinite { context } => write!(f, "non-finite entry: {context}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
