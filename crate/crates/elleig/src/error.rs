use std::fmt;

/// Errors shared across the numerical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Requested accuracy cannot be certified by the internal
    /// series/recurrence even after raising guard digits.
    PrecisionUnachievable(String),
    /// Precision context parameters out of range.
    InvalidPrecision(String),
    /// Root bracketing failed: same sign at both endpoints.
    InvalidBracket { lo: String, hi: String },
    /// Iteration cap reached before the root was localized.
    NonConvergence(String),
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// Shape too close to the degenerate strip for the centered basis.
    DegenerateShape(String),
    /// Initial eigenvalue bracket contains no determinant sign change.
    NoSignChange { m: usize, detail: String },
    /// Ladder agreement stalled before reaching the digit target.
    CertificationFailure(String),
    /// Linear system is singular (e.g. duplicate abscissae).
    SingularSystem(String),
    /// Fewer data points than unknown coefficients.
    InsufficientData { needed: usize, got: usize },
    /// Records do not match the model's convention.
    ConventionMismatch(String),
    /// Division by a vanishing power of the abscissa during deflation.
    DivisionUnderflow(String),
    /// Lattice rows are linearly dependent over the rationals.
    DependentRows,
    /// Relation search needs more trusted digits than supplied.
    PrecisionTooLow { digits: u32, needed: u32 },
    /// A relation with a vanishing leading coefficient cannot be solved
    /// for the target.
    DegenerateRelation,
    /// Malformed data file, config file, or CLI input.
    Parse(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionUnachievable(s) => write!(f, "precision unachievable: {s}"),
            Error::InvalidPrecision(s) => write!(f, "invalid precision context: {s}"),
            Error::InvalidBracket { lo, hi } => {
                write!(f, "invalid bracket: f({lo}) and f({hi}) have the same sign")
            }
            Error::NonConvergence(s) => write!(f, "root refinement did not converge: {s}"),
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::DegenerateShape(s) => write!(f, "degenerate shape: {s}"),
            Error::NoSignChange { m, detail } => {
                write!(f, "no determinant sign change in bracket at M={m}: {detail}")
            }
            Error::CertificationFailure(s) => write!(f, "certification failure: {s}"),
            Error::SingularSystem(s) => write!(f, "singular system: {s}"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need {needed} records, got {got}")
            }
            Error::ConventionMismatch(s) => write!(f, "convention mismatch: {s}"),
            Error::DivisionUnderflow(s) => write!(f, "division underflow in deflation: {s}"),
            Error::DependentRows => write!(f, "lattice rows are linearly dependent"),
            Error::PrecisionTooLow { digits, needed } => {
                write!(f, "only {digits} trusted digits, need at least {needed}")
            }
            Error::DegenerateRelation => write!(f, "relation has zero leading coefficient"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::Io(s) => write!(f, "io error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
