use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("representation error: {0}")]
    Representation(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("integration blew up at t = {time}: {reason}")]
    IntegrationBlowup { time: f64, reason: String },

    #[error("CFL violation: dt = {dt} exceeds limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("flow map degenerate at t = {time}")]
    FlowMapDegenerate { time: f64 },

    #[error("state carries no group elements (theta)")]
    MissingTheta,

    #[error("velocity field is not divergence free (residual {0:e})")]
    Compressible(f64),

    #[error("field mean {0:e} exceeds zero-mean tolerance")]
    NonzeroMean(f64),

    #[error("missing partial derivatives: {0}")]
    MissingPartials(String),

    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),

    #[error("degenerate loop: {0}")]
    DegenerateLoop(String),
}

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
