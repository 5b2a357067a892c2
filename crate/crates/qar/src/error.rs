//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model construction, solvers, and I/O-facing validation.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A physical constraint is violated (distinct from bad input syntax):
    /// e.g. the dressed-frequency condition ω_h·ω_c > ε².
    #[error("physics constraint violated: {0}")]
    Constraint(String),

    /// Entropy production came out below −tolerance; the generator that
    /// produced these currents is thermodynamically inconsistent.
    #[error(
        "second law violated: sigma_total = {sigma_total:.6e} \
         (sigma_hot = {sigma_hot:.6e}, sigma_cold = {sigma_cold:.6e})"
    )]
    SecondLawViolation {
        sigma_hot: f64,
        sigma_cold: f64,
        sigma_total: f64,
    },

    /// Truncated Hilbert space would exceed the configured dimension cap.
    #[error("dimension cap exceeded: {requested} > {cap}")]
    DimensionCap { requested: usize, cap: usize },

    /// The stationary solve found more than one kernel direction, which
    /// signals a decoupled sector (usually a modeling error).
    #[error("degenerate stationary kernel: {0}")]
    DegenerateKernel(String),

    /// An iterative procedure failed to reach its tolerance.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    /// Internal inconsistency that should be unreachable for validated inputs.
    #[error("internal error: {0}")]
    Internal(String),

    /// Configuration file / CLI validation failure.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code per the CLI contract: 2 config validation,
    /// 3 physics constraint, 4 numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } => 2,
            Error::Constraint(_) | Error::SecondLawViolation { .. } => 3,
            Error::NonConvergence(_)
            | Error::DegenerateKernel(_)
            | Error::DimensionCap { .. } => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
