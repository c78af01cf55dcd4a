use thiserror::Error;

/// Everything that can go wrong between parsing a parameter and printing a table.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),

    #[error("precision: {0}")]
    Precision(String),

    #[error("invalid parameters: {0}")]
    Validity(String),

    #[error("degenerate case: {0}")]
    Degenerate(String),

    /// The discrete Painlevé flow hit a movable singularity.
    #[error("singularity at n = {index}: {reason}")]
    Singularity { index: usize, reason: String },

    #[error("rank deficiency at n = {index}: {reason}")]
    Rank { index: usize, reason: String },

    #[error("found {found} sign changes of P_{degree}, expected {degree}")]
    ZeroCount { degree: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },

    #[error("b0(t) not monotone between t = {t_lo} and t = {t_hi}")]
    Monotonicity { t_lo: String, t_hi: String },

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

impl Error {
    pub(crate) fn singular(index: usize, reason: impl Into<String>) -> Self {
        Error::Singularity {
            index,
            reason: reason.into(),
        }
    }

    pub(crate) fn rank(index: usize, reason: impl Into<String>) -> Self {
        Error::Rank {
            index,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
