use thiserror::Error;

/// Failures raised anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TunnelError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("mapping singularity: {0}")]
    Singularity(String),
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
    #[error("linear solve failed (2-norm condition estimate {cond:.3e})")]
    SolverFailure { cond: f64 },
    #[error("no convergence after {reps} reps (last increment {last:.3e})")]
    NonConvergence {
        reps: usize,
        last: f64,
        history: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, TunnelError>;
