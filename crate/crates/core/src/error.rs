use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("evolution diverged at t = {time}: non-finite amplitude")]
    Diverged { time: f64 },

    #[error("discretized dimension {dimension} exceeds cap {cap}")]
    SizeCap { dimension: usize, cap: usize },

    #[error("guidance evaluated too close to a node (density {density:.3e})")]
    NodeProximity { density: f64 },

    #[error("stale ensemble: ensemble time {ensemble} differs from wavefunction time {wavefunction}")]
    Stale { ensemble: f64, wavefunction: f64 },

    #[error("inconclusive measurement: branch separation {separation:.3} pointer widths (need > {required})")]
    Inconclusive { separation: f64, required: f64 },

    #[error("timeout: {0}")]
    Timeout(String),

    #[error("zero mode must be excluded for this model")]
    ZeroMode,

    #[error("periodic Poisson problem is not solvable: net charge {net_charge:.3e}")]
    NonNeutral { net_charge: f64 },

    #[error("operation needs at least two time snapshots, got {0}")]
    NeedsHistory(usize),

    #[error("non-normalizable state: Re(width) = {0:.3e} in mode {1}")]
    NonNormalizable(f64, usize),

    #[error("outside validity window: {0}")]
    OutOfRange(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
