use thiserror::Error;

/// Every failure the library can report.
///
/// Variants carry enough context to be rendered as a machine-readable
/// `{error, detail}` pair by front ends; [`Error::kind`] gives the stable tag.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not skew-symmetric (relative deviation {0:.3e})")]
    NotSkew(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is singular (|det| = {0:.3e})")]
    Singular(f64),
    #[error("malformed Hermitian matrix: {0}")]
    MalformedHermitian(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular values failed to pair (relative gap {0:.3e})")]
    PairingFailure(f64),
    #[error("degenerate eigenvector pair: |sigma(f, e)| = {0:.3e}")]
    DegeneratePair(f64),
    #[error("bad lambdas: {0}")]
    BadLambdas(String),
    #[error("forms coincide up to sign")]
    FormsCoincide,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("state form does not match the Darboux matrix target")]
    FormMismatch,
    #[error("bad mode split n_a = {n_a} for n = {n}")]
    BadSplit { n_a: usize, n: usize },
    #[error("degenerate combination: |det(alpha Sigma + beta Upsilon)| = {0:.3e}")]
    DegenerateCombination(f64),
    #[error("degree budget exceeded: degree {degree} > {budget}")]
    DegreeBudgetExceeded { degree: usize, budget: usize },
    #[error("term budget exceeded: {terms} terms > {budget}")]
    TermBudgetExceeded { terms: usize, budget: usize },
    #[error("grid budget exceeded: {points} points > {budget}")]
    BudgetExceeded { points: u64, budget: u64 },
    #[error("too many KLM points: {0} > 512")]
    TooManyPoints(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier used in serialized error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::NotSkew(_) => "NotSkew",
            Error::NonFinite => "NonFinite",
            Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
            Error::Singular(_) => "Singular",
            Error::MalformedHermitian(_) => "MalformedHermitian",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::PairingFailure(_) => "PairingFailure",
            Error::DegeneratePair(_) => "DegeneratePair",
            Error::BadLambdas(_) => "BadLambdas",
            Error::FormsCoincide => "FormsCoincide",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::FormMismatch => "FormMismatch",
            Error::BadSplit { .. } => "BadSplit",
            Error::DegenerateCombination(_) => "DegenerateCombination",
            Error::DegreeBudgetExceeded { .. } => "DegreeBudgetExceeded",
            Error::TermBudgetExceeded { .. } => "TermBudgetExceeded",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::TooManyPoints(_) => "TooManyPoints",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
