use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("local operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("derivative undefined at {0} (pole or point at infinity)")]
    Pole(String),

    #[error("points do not close into a cycle (residual {residual:e})")]
    NotACycle { residual: f64 },

    #[error("finite-difference Jacobian is ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("root polishing failed to converge: {0}")]
    NoConvergence(String),

    #[error("grid has a single label; boundary is empty")]
    DegenerateGrid,

    #[error("could not parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
