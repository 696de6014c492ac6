use thiserror::Error;

/// Errors shared by all modules.
///
/// Each variant carries a stable machine-readable code, exposed through
/// [`Error::code`]; the CLI prints it alongside the human message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("discriminant is zero: the equation is singular over Q")]
    SingularCurve,

    #[error("prime {0} exceeds the 2^31 ceiling")]
    PrimeTooLarge(u64),

    #[error("residue table built for prime {table} used with prime {requested}")]
    TableMismatch { table: u64, requested: u64 },

    #[error("corpus line {line}: {msg}")]
    Corpus { line: usize, msg: String },

    #[error("duplicate label {0}")]
    DuplicateLabel(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("no members with parity {0}")]
    EmptyParity(u8),

    #[error("series prime grid exceeds interval start {0}")]
    GridExceedsWindow(u64),

    #[error("zero variance")]
    ZeroVariance,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("single class in training labels")]
    SingleClass,

    #[error("diverged; lower learning rate")]
    Diverged,

    #[error("invalid interval: lo {lo} must be below hi {hi}")]
    BadInterval { lo: u64, hi: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable code for the diagnostic stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularCurve => "E_DISCRIMINANT_ZERO",
            Error::PrimeTooLarge(_) => "E_PRIME_TOO_LARGE",
            Error::TableMismatch { .. } => "E_TABLE_MISMATCH",
            Error::Corpus { .. } => "E_CORPUS_PARSE",
            Error::DuplicateLabel(_) => "E_DUPLICATE_LABEL",
            Error::EmptyDataset => "E_EMPTY_DATASET",
            Error::EmptyParity(_) => "E_EMPTY_PARITY",
            Error::GridExceedsWindow(_) => "E_GRID_EXCEEDS_WINDOW",
            Error::ZeroVariance => "E_ZERO_VARIANCE",
            Error::DimensionMismatch { .. } => "E_DIMENSION_MISMATCH",
            Error::SingleClass => "E_SINGLE_CLASS",
            Error::Diverged => "E_DIVERGED",
            Error::BadInterval { .. } => "E_BAD_INTERVAL",
            Error::Io(_) => "E_IO",
        }
    }
}
