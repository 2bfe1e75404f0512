use thiserror::Error;

pub type Result<T, E = GneError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GneError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("game has no players")]
    EmptyGame,

    #[error("cost curvature of player {player} is not symmetric positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { player: usize, min_eigenvalue: f64 },

    #[error("local constraint set of player {player} is {reason}")]
    BadLocalSet { player: usize, reason: &'static str },

    #[error("game mapping is not monotone (smallest eigenvalue of the symmetric part {min_eigenvalue:e})")]
    NotMonotone { min_eigenvalue: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("complementary pivoting ended on a secondary ray after {pivots} pivots")]
    RayTermination { pivots: usize },

    #[error("equilibrium set is not a segment: {0}")]
    NotASegment(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GneError {
    /// True for failures of the numerical pipeline, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            GneError::Infeasible(_)
                | GneError::Unbounded(_)
                | GneError::Numerical(_)
                | GneError::RayTermination { .. }
                | GneError::NotASegment(_)
        )
    }
}
