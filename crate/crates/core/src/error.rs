use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("closure certification failed: {0}")]
    Closure(String),

    #[error("invalid projection or idempotent: {0}")]
    InvalidProjection(String),

    #[error("{what} is not contained in {container} (residual {residual:.3e})")]
    NotContained {
        what: String,
        container: String,
        residual: f64,
    },

    #[error("algebra is not semisimple within tolerance: {0}")]
    NotSemisimple(String),

    #[error("stage `{stage}` failed: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Stage {
        stage: String,
        residual: f64,
        tol: f64,
    },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
}

impl Error {
    pub(crate) fn stage(stage: impl Into<String>, residual: f64, tol: f64) -> Self {
        Error::Stage {
            stage: stage.into(),
            residual,
            tol,
        }
    }
}
