use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A trap sits on top of a dot, so the 1/r potential diverges.
    #[error("trap {trap} coincides with dot {dot}")]
    Singular { trap: usize, dot: usize },

    #[error("invalid gate design (n={n}, m={m}): {reason}")]
    InvalidDesign { n: u32, m: u32, reason: String },

    #[error("time {t:e} s lies outside the record horizon [0, {horizon:e}] s")]
    OutsideHorizon { t: f64, horizon: f64 },

    #[error("switching records do not share a common horizon")]
    HorizonMismatch,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from user input rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::InvalidGeometry(_)
                | Error::InvalidDesign { .. }
                | Error::Json(_)
        )
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
