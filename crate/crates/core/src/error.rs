use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bodies {0} and {1} coincide")]
    Coincident(usize, usize),

    #[error("kinematic constraint violated: {0}")]
    Kinematic(String),

    /// No real motion is possible at this starting point.
    #[error("forbidden: no real motion here (radicand {0:.3e})")]
    Forbidden(f64),

    #[error("no solution found (best residual {residual:.3e})")]
    NoSolution { residual: f64 },

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("resume refused: {0}")]
    ResumeRefused(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Errors caused by the inputs rather than by the environment.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Internal(_))
    }
}
