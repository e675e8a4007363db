use std::fmt;

use thiserror::Error;

/// Location-tagged syntax error from one of the text grammars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),

    #[error("undeclared generator `{0}`")]
    UndeclaredGenerator(String),

    #[error("invalid presentation: {0}")]
    Presentation(String),

    #[error("invalid tower: {0}")]
    Tower(String),

    #[error("level {level}: automorphism does not induce an automorphism (generator `{generator}`): {reason}")]
    NotInvariant {
        level: usize,
        generator: String,
        reason: String,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("chain map condition fails at level {level}, degree {degree}")]
    ChainMap { level: usize, degree: usize },

    #[error("complex fails validation at level {level}, degree {degree}")]
    NotAComplex { level: usize, degree: usize },

    #[error("matrix is not positive semidefinite at level {level}: smallest eigenvalue {min_eigenvalue:e}")]
    Indefinite { level: usize, min_eigenvalue: f64 },

    #[error("matrix is not star-symmetric")]
    NotSelfAdjoint,

    #[error("presentation is not free abelian: {0}")]
    NotAbelian(String),

    #[error("Laplacian determinant vanishes identically in degree {degree}; complex is not det-L2-acyclic")]
    NotDetAcyclic { degree: usize },

    #[error("polynomial appears to vanish identically on the torus")]
    ZeroPolynomial,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("decomposition node {path}: {message}")]
    Decomposition { path: String, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that mean a numeric precondition failed rather than
    /// malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Indefinite { .. }
                | Error::NotSelfAdjoint
                | Error::NotDetAcyclic { .. }
                | Error::ZeroPolynomial
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
