use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: estimate {estimate} with error {error:e} (tolerance {tolerance:e})")]
    NonConvergence {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("empty neighbor census")]
    EmptyCensus,

    #[error("node {0} has no coordinate")]
    MissingCoordinate(usize),

    #[error("offset table is empty")]
    EmptyTable,

    #[error("malformed offset table: {0}")]
    MalformedTable(String),

    #[error("sink has no radio links; no node can be initialized")]
    DisconnectedSink(Box<crate::sim::SimOutcome>),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
