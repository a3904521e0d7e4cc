use thiserror::Error;

/// Errors raised by the workbench operations.
///
/// Structural problems with a [`Scheme`](crate::model::Scheme) are reported as
/// [`Violation`](crate::model::Violation) values rather than errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BiaError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("preset mode {mode} at receiver {receiver}, slot {slot} is outside [1:{modes}]")]
    PatternOutOfRange {
        receiver: usize,
        slot: usize,
        mode: usize,
        modes: usize,
    },

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("unsupported document version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },

    #[error("enumeration of {requested} subsets exceeds the budget of {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("cells have different antenna totals: {0:?}")]
    AsymmetricCells(Vec<usize>),

    #[error("no synthesis template applies to (M,N,K)=({m},{n},{k})")]
    UnsupportedConfig { m: usize, n: usize, k: usize },

    #[error("R1={r1} and R2={r2} are not both integers")]
    NotIntegerCase { r1: String, r2: String },

    #[error("unknown golden example `{0}`")]
    UnknownName(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
}

pub type Result<T> = std::result::Result<T, BiaError>;

impl BiaError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        BiaError::Domain(msg.into())
    }

    /// Stable upper-case identifier for reports and exit-code mapping.
    pub fn code(&self) -> &'static str {
        match self {
            BiaError::Domain(_) => "DOMAIN",
            BiaError::PatternOutOfRange { .. } => "PATTERN_OUT_OF_RANGE",
            BiaError::Parse { .. } => "PARSE_ERROR",
            BiaError::SchemaVersionMismatch { .. } => "SCHEMA_VERSION_MISMATCH",
            BiaError::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
            BiaError::Unbounded => "UNBOUNDED",
            BiaError::Infeasible => "INFEASIBLE",
            BiaError::AsymmetricCells(_) => "ASYMMETRIC_CELLS",
            BiaError::UnsupportedConfig { .. } => "UNSUPPORTED_CONFIG",
            BiaError::NotIntegerCase { .. } => "NOT_INTEGER_CASE",
            BiaError::UnknownName(_) => "UNKNOWN_NAME",
            BiaError::InvalidScheme(_) => "INVALID_SCHEME",
        }
    }
}
