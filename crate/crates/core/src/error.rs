use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported type label `{0}`")]
    UnsupportedType(String),

    #[error("elements belong to different Coxeter data")]
    DatumMismatch,

    #[error("invalid generator {0} for this datum")]
    BadGenerator(usize),

    #[error("ball of radius {radius} exceeds the element budget of {cap}")]
    BallTooLarge { radius: usize, cap: usize },

    #[error("computation needs elements beyond the ball of radius {radius}: {what}")]
    BallExceeded { radius: usize, what: String },

    #[error("element not in the ball")]
    NotInBall,

    #[error("a-values are not certified: {0}")]
    Uncertified(String),

    #[error("elements from different cells: {0}")]
    MixedCells(String),

    #[error("cell/orbit count mismatch: {cells} cells vs {orbits} orbits")]
    CountMismatch { cells: usize, orbits: usize },

    #[error("cannot disambiguate the pairing: {0}")]
    Ambiguous(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
