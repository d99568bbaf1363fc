use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid network specification: {0}")]
    InvalidSpec(String),

    #[error("unknown initialization scheme `{0}`")]
    UnknownScheme(String),

    #[error("nonsmooth trunk: second input derivatives requested through a sigma1 layer")]
    NonsmoothTrunk,

    #[error("full-hessian jets support input dimension <= 3, got {0}")]
    HessianDimension(usize),

    #[error("grid resolution {grid_res} undersamples a field with {required} modes per axis")]
    Undersampled { grid_res: usize, required: usize },

    #[error("point outside the unit cube: {0:?}")]
    OutsideDomain(Vec<f64>),

    #[error("singular Gram matrix in least-squares fit")]
    SingularGram,

    #[error("quadrature not converged: refinement changed a coefficient by {delta:e}")]
    QuadratureNonconvergence { delta: f64 },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: usize, trace: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
