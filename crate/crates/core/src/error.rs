use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{potential} evaluated to a non-finite value at x = {x}")]
    Evaluation { potential: String, x: f64 },

    #[error("Newton iteration for {what} did not converge in {iterations} steps (last iterate {last})")]
    NewtonNonConvergence {
        what: String,
        iterations: usize,
        last: Complex64,
    },

    #[error("turning points {first} and {second} collide at E = {energy} (separation {separation:e})")]
    TurningPointCollision {
        first: &'static str,
        second: &'static str,
        energy: Complex64,
        separation: f64,
    },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("integrand crosses the square-root branch cut at t = {at}")]
    BranchAmbiguity { at: Complex64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (achieved {achieved:e})")]
    QuadratureAccuracy { tolerance: f64, achieved: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("contour check failed: {0}")]
    Contour(String),

    #[error("banded LU broke down at pivot {pivot}")]
    SingularPivot { pivot: usize },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("root bracketing failed for {0}")]
    Bracketing(String),

    #[error("no prediction/oracle pairings at h = {h}")]
    NoPairings { h: f64 },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
