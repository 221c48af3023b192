use thiserror::Error;

use crate::spectral::Classification;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state dimension mismatch: symmetry acts on {expected}-d states, got {found}-d")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fixed point is not hyperbolic (eigenvalue on the unit circle)")]
    NonHyperbolic,

    #[error("eigenvalues at the origin are not all real ({0:?}); manifolds need A in [(-2+sqrt 2)/4, 0)")]
    NotAllReal(Classification),

    #[error("resonance at order ({n}, {m}): |k0(rate)| = {value:e}")]
    Resonance { n: usize, m: usize, value: f64 },

    #[error("coefficient overflow at total degree {order}")]
    CoefficientOverflow { order: usize },

    #[error("could not fix eigenvector scaling: {0}")]
    Scaling(String),

    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("Newton iterate left the evaluation box at iteration {iteration}")]
    LeftBox { iteration: usize },

    #[error("Newton did not converge after {iterations} iterations (|G| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("candidate is the trivial intersection at the origin (|point| = {norm:e})")]
    TrivialSolution { norm: f64 },

    #[error("candidate residual {residual:e} exceeds threshold {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },

    #[error("orbit diverged at step {step} (|state| = {norm:e})")]
    Divergence { step: usize, norm: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("ill-conditioned fit (condition number {cond:e})")]
    IllConditionedFit { cond: f64 },

    #[error("series were built for different parameters")]
    ParamsMismatch,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
