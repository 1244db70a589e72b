use thiserror::Error;

/// Errors shared across the whole library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("MixedFields: operands belong to different fields")]
    MixedFields,
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("ParseError: at position {pos}: {msg}")]
    ParseError { pos: usize, msg: String },
    #[error("InvalidModulus: {0} is not a prime in [2, 2^31)")]
    InvalidModulus(u64),
    #[error("NotAUnit: constant coefficient is zero")]
    NotAUnit,
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("Singular: matrix is not invertible")]
    Singular,
    #[error("SizeLimit: {0}")]
    SizeLimit(String),
    #[error("ArityMismatch: expected {expected} initial conditions, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("NotConstantCoefficient: operation requires a constant-coefficient operator")]
    NotConstantCoefficient,
    #[error("SingularWronskian: Wronskian has zero constant term")]
    SingularWronskian,
    #[error("CentralizerMismatch: commutant has dimension {got}, expected {expected}")]
    CentralizerMismatch { expected: usize, got: usize },
    #[error("NotSplitOverK: {0}")]
    NotSplitOverK(String),
    #[error("NotAMember: {0}")]
    NotAMember(String),
}

impl Error {
    /// Stable machine-readable name, used by the CLI on the diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MixedFields => "MixedFields",
            Error::DivisionByZero => "DivisionByZero",
            Error::ParseError { .. } => "ParseError",
            Error::InvalidModulus(_) => "InvalidModulus",
            Error::NotAUnit => "NotAUnit",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::Singular => "Singular",
            Error::SizeLimit(_) => "SizeLimit",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::NotConstantCoefficient => "NotConstantCoefficient",
            Error::SingularWronskian => "SingularWronskian",
            Error::CentralizerMismatch { .. } => "CentralizerMismatch",
            Error::NotSplitOverK(_) => "NotSplitOverK",
            Error::NotAMember(_) => "NotAMember",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
