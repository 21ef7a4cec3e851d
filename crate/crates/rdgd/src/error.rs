//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigenvalue iteration did not converge within {max_iters} iterations (last delta {delta:e})")]
    EigenNonConvergence { max_iters: usize, delta: f64 },

    #[error("Lambert W_-1 domain violation: x = {0:e} lies outside [-1/e, 0)")]
    LambertDomain(f64),

    #[error("non-finite value entered {context}")]
    NonFinite { context: String },

    #[error("corruption budget violated at t = {t}: spent {spent:e} exceeds envelope {envelope:e}")]
    BudgetViolation { t: usize, spent: f64, envelope: f64 },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("config error (line {line}, key `{key}`): {msg}")]
    Config { line: usize, key: String, msg: String },

    #[error("config error: {0}")]
    ConfigGeneral(String),

    #[error("{path}: {msg}")]
    Idx { path: PathBuf, msg: String },

    #[error("singular normal equations: {0}")]
    SingularSystem(String),

    #[error("reference optimum outside the feasible ball (|theta*| = {norm:.6} > radius {radius:.6}); enlarge `radius` in the config")]
    OptimumOutsideBall { norm: f64, radius: f64 },

    #[error("trial {trial} aborted at round {round}: {source}")]
    TrialAborted {
        trial: usize,
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("the restart bound requires t > t0 (got t = {t}, t0 = {t0})")]
    BoundBeforeTransition { t: usize, t0: usize },

    #[error("server-state invariant violated at round {t}: {what}")]
    Invariant { t: usize, what: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    /// Process exit code: 1 for configuration problems, 2 for runtime aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::ConfigGeneral(_) | Error::Schedule(_) => 1,
            _ => 2,
        }
    }
}
