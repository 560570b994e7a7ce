use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite input `{0}`")]
    NonFinite(&'static str),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("quadrature grid of {nodes} nodes is too coarse for frequencies up to {needed}")]
    GridTooCoarse { nodes: usize, needed: u128 },

    #[error("invalid sampled graph: {0}")]
    InvalidGraph(String),

    #[error("delta {delta} is below the sampling resolution (spacing {spacing})")]
    BelowResolution { delta: f64, spacing: f64 },

    #[error("empty window around x = {x} for delta {delta}")]
    EmptyWindow { x: f64, delta: f64 },

    #[error("invalid ladder: {0}")]
    InvalidLadder(String),

    #[error("only {usable} usable ladder points, at least {required} are needed")]
    TooFewPoints { usable: usize, required: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(
        "truncation coupling violated: M = {m} but the ladder reaches n_max = {n_max} (need M >= n_max + {margin})"
    )]
    TruncationCoupling { m: u32, n_max: i32, margin: i32 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("calibration failed, estimator is not trusted: {0}")]
    CalibrationFailed(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::NonFinite(_) => "non_finite",
            Error::Overflow(_) => "overflow",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::BelowResolution { .. } => "below_resolution",
            Error::EmptyWindow { .. } => "empty_window",
            Error::InvalidLadder(_) => "invalid_ladder",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::Degenerate(_) => "degenerate",
            Error::TruncationCoupling { .. } => "truncation_coupling",
            Error::Precondition(_) => "precondition",
            Error::CalibrationFailed(_) => "calibration_failed",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
