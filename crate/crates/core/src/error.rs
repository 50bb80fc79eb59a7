use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("truncation must be positive")]
    EmptySeries,

    #[error("not expandable on disk: {0}")]
    NotExpandable(String),

    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(String),

    #[error("degenerate Mobius map (ad - bc = 0)")]
    DegenerateMap,

    #[error("image of the unit circle is a line (|c| = |d|)")]
    UnboundedImage,

    #[error("not a strict self-map; operator may be unbounded (sup norm {sup_norm:.6})")]
    NotSelfMap { sup_norm: f64 },

    #[error("u must be nonzero")]
    ZeroWeight,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by violating the standing operator hypotheses
    /// (as opposed to malformed input).
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::NotSelfMap { .. } | Error::NotExpandable(_) | Error::UnboundedImage
        )
    }
}
