//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by objective construction, the engine, oracles, and
/// scenario handling.
#[derive(Debug, Error)]
pub enum Error {
    /// Step scale violates the `0 < c <= 1/L` contract of the prox-gradient map.
    #[error("step scale {step} out of range for gradient Lipschitz constant {lipschitz} (require 0 < c <= 1/L)")]
    StepOutOfRange { step: f64, lipschitz: f64 },

    /// A point fell outside the domain of a nonsmooth term.
    #[error("point outside the domain of the nonsmooth term")]
    OutsideDomain,

    /// Quadratic construction received a non-symmetric matrix.
    #[error("quadratic matrix is not symmetric")]
    NotSymmetric,

    /// Quadratic construction received an indefinite matrix.
    #[error("quadratic matrix is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// A declared gradient Lipschitz constant failed the sampled-ratio validation.
    #[error("declared Lipschitz constant {declared} violated: observed ratio {observed}")]
    LipschitzViolated { declared: f64, observed: f64 },

    /// Weights do not sum to one.
    #[error("weights must sum to 1 (got {sum})")]
    WeightSum { sum: f64 },

    /// A single weight is outside `[0, 1]`.
    #[error("weight {value} at index {index} outside [0, 1]")]
    WeightRange { index: usize, value: f64 },

    /// A step size is not strictly positive.
    #[error("step size {value} for objective {index} must be > 0")]
    StepNotPositive { index: usize, value: f64 },

    /// A step size exceeds `1/L` for some time step.
    #[error("step size C_{index} = {step} exceeds 1/L = {limit} at t = {t}")]
    StepExceedsLimit {
        index: usize,
        step: f64,
        limit: f64,
        t: usize,
    },

    /// Configuration horizon does not match the stream.
    #[error("horizon mismatch: configured T = {expected}, stream provides {actual}")]
    HorizonMismatch { expected: usize, actual: usize },

    /// Dimension mismatch between a point and the stream or config.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// An offline solve exhausted its iteration budget.
    #[error(
        "oracle failed to converge: residual {residual} after {iterations} iterations (tol {tol})"
    )]
    ConvergenceFailure {
        residual: f64,
        iterations: usize,
        tol: f64,
        best: Box<nalgebra::DVector<f64>>,
    },

    /// An oracle solve failed for objective `i` at time `t`.
    #[error("oracle solve failed for objective {i} at t = {t}: {source}")]
    OracleAt {
        i: usize,
        t: usize,
        source: Box<Error>,
    },

    /// The requested combination of nonsmooth terms is not supported.
    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    /// A bound checker was called with weights it does not apply to.
    #[error("{0}")]
    WeightCase(String),

    /// Scenario document parse failure.
    #[error("parse error at line {line} (key `{key}`): {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    /// Grid front request outside the supported desk scale.
    #[error("unsupported grid request: {0}")]
    UnsupportedGrid(String),

    /// I/O failure while emitting reports.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
