use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid correlation structure: {0}")]
    InvalidCorrelation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("integration failure at t = {t}, h = {h}: non-finite stage value")]
    IntegrationFailure { t: f64, h: f64 },

    #[error("finite-volume blow-up at t = {t} on a grid of {cells} cells")]
    BlowUp { t: f64, cells: usize },

    #[error("undefined CFL step: state is identically zero")]
    ZeroState,

    #[error("history too short: need at least {needed} time levels, got {got}")]
    ShortHistory { needed: usize, got: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("initial point has log-posterior -inf")]
    InfeasibleStart,

    #[error("trace too short: need {needed} samples, got {got}")]
    ShortTrace { needed: usize, got: usize },

    #[error("empty trace")]
    EmptyTrace,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
