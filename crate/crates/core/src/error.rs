use thiserror::Error;

use crate::blocks::BlockNormCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A cube, cell or region does not fit the grid domain it is used with.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A query has no feasible answer (for example a non-positive cover scale).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The block-norm solver ran out of rounds; the best certificate pair is attached.
    #[error("block-norm solver did not reach gap {tol:e} (best gap {:e})", best.gap)]
    NonConvergence { tol: f64, best: Box<BlockNormCertificate> },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
