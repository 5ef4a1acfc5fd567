use std::fmt;

use crate::sdp::SdpSolution;

/// Which side of a pebble game broke the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Spoiler,
    Duplicator,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Spoiler => f.write_str("spoiler"),
            Side::Duplicator => f.write_str("duplicator"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("vector is not in the span of the given basis")]
    NotInSpan,
    #[error("assignment is missing vertex `{0}`")]
    IncompleteAssignment(String),
    #[error("search too large: {0}")]
    SearchTooLarge(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("strategy violation by {side}: {detail}")]
    StrategyViolation { side: Side, detail: String },
    #[error("solver did not converge (best residual {:.3e})", best.residual)]
    Convergence { best: Box<SdpSolution> },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn violation(side: Side, detail: impl Into<String>) -> Self {
        Error::StrategyViolation {
            side,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
