use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("invalid grid function: {0}")]
    InvalidGridFunction(String),

    #[error("breakpoint {position} lies outside the grid span [{left}, {right}]")]
    ExteriorJump {
        position: f64,
        left: f64,
        right: f64,
    },

    #[error("incompatible functions: {0}")]
    IncompatibleFunctions(String),

    #[error("far states differ: left {left_u} vs {left_v}, right {right_u} vs {right_v}")]
    FarStateMismatch {
        left_u: f64,
        left_v: f64,
        right_u: f64,
        right_v: f64,
    },

    #[error("total mass differs by {defect:e} (tolerance {tolerance:e})")]
    MassMismatch { defect: f64, tolerance: f64 },

    #[error("states ({left}, {right}) do not form an admissible shock")]
    NotAShock { left: f64, right: f64 },

    #[error("initial data is not strictly decreasing")]
    NotDecreasing,

    #[error("Lax-Friedrichs flux requires the mesh ratio lambda")]
    MissingLambda,

    #[error("flux has zero wave speed on [{u_min}, {u_max}]; time step is unbounded")]
    NoWaveSpeed { u_min: f64, u_max: f64 },

    #[error("CFL violation: lambda * max|f'| = {courant} exceeds {limit}")]
    CflViolation { courant: f64, limit: f64 },

    #[error("no convergence after {steps} steps (residual {residual:e}, tolerance {tolerance:e})")]
    NoConvergence {
        steps: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("profile window of {available} samples is too small, need {required}")]
    InsufficientWindow { available: usize, required: usize },

    #[error("profile tails are below the noise floor; decay rate is unbounded")]
    TailTooSharp,

    #[error("incompatible dual coefficients: {0}")]
    IncompatibleCoefficients(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("degenerate error value {0}; observed order is undefined")]
    DegenerateError(f64),

    #[error("error table is empty")]
    EmptyTable,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
