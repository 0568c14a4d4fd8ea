use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("leg length {0} m is outside the foldable range (|q2| must stay below pi)")]
    LegFolded(f64),

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("metric over an empty series")]
    EmptySeries,

    #[error("improvement needs a positive baseline, got {0}")]
    NonPositiveBaseline(f64),

    #[error("simulation fault at tick {tick}: {reason}")]
    SimulationFault { tick: usize, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
