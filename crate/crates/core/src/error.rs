use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid qudit dimension {0}: dimensions must be prime")]
    CompositeDimension(u32),

    #[error("invalid qudit dimension {0}: dimensions must be at least 2")]
    DimensionTooSmall(u32),

    #[error("exponent {value} out of range for dimension {dim}")]
    ExponentOutOfRange { value: u32, dim: u32 },

    #[error("register mismatch: {0}")]
    RegisterMismatch(String),

    #[error("dense dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("qudit index {index} out of range for a register of {len} qudits")]
    QuditIndex { index: usize, len: usize },

    #[error("strings do not commute: {0}")]
    NotCommuting(String),

    #[error("string is not diagonal: {0}")]
    NotDiagonal(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error("probe construction failed: {0}")]
    ProbeConstruction(String),

    #[error("missing estimate for pair ({0}, {1})")]
    MissingEstimate(usize, usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable category, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::CompositeDimension(_) | Self::DimensionTooSmall(_) | Self::DimensionCap { .. } => "dimension",
            Self::ExponentOutOfRange { .. }
            | Self::RegisterMismatch(_)
            | Self::DimensionMismatch { .. }
            | Self::LengthMismatch { .. }
            | Self::QuditIndex { .. } => "shape",
            Self::NotCommuting(_) | Self::NotDiagonal(_) | Self::InvalidGate(_) | Self::ProbeConstruction(_) => "circuit",
            Self::NotNormalized(_) | Self::ZeroVector => "state",
            Self::InvalidProbability { .. } | Self::InvalidSetting(_) => "setting",
            Self::TooFewSamples { .. } | Self::MissingEstimate(..) | Self::ZeroDenominator(_) => "estimation",
            Self::Empty(_) => "empty",
            Self::Parse { .. } | Self::Format(_) | Self::Csv(_) => "parse",
            Self::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
