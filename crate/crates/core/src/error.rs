use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff {cutoff} holds squared norm {norm:.15}, below the required {required:.15}")]
    Truncation {
        cutoff: usize,
        norm: f64,
        required: f64,
    },

    #[error("QFI finite difference did not converge: step estimate {coarse:.12e}, refined {refined:.12e}")]
    NonConvergence { coarse: f64, refined: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lower arm radius {r_a} m is not outside the Schwarzschild radius {r_s} m")]
    Horizon { r_s: f64, r_a: f64 },

    #[error("quantum Fisher information is zero; the estimator variance is unbounded")]
    UnboundedVariance,

    #[error("relative error of r_s is undefined for r_s = 0")]
    UndefinedRelativeError,

    #[error("linearization invalid: chi*tau*sqrt(N) = {metric:.4e} exceeds {threshold}")]
    Linearization { metric: f64, threshold: f64 },

    #[error("arcsin argument tau2/tau1 = {0} lies outside (0, 1]")]
    Domain(f64),

    #[error("mean quadrature slope with respect to r_s is zero; estimator is not invertible")]
    ZeroSlope,

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 for configuration and validation problems, 3 for numerical
    /// non-convergence, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } => 3,
            Error::Io(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
