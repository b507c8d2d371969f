//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by problem construction, model fitting and optimization runs.
#[derive(Error, Debug, Clone)]
pub enum Error {
    /// A coordinate of an evaluation point lies outside the problem box.
    #[error("coordinate {index} = {value} outside bounds [{lower}, {upper}]")]
    BoundsViolation {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    /// Invalid problem definition (degenerate bounds, missing data, ...).
    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),

    /// An equality constraint has no conversion direction configured.
    #[error("missing equality direction: {got} directions for {want} equalities")]
    MissingDirection { want: usize, got: usize },

    /// Two RBF centers coincide (within the duplicate tolerance).
    #[error("duplicate centers {a} and {b} (distance {dist:.3e})")]
    DuplicateCenters { a: usize, b: usize, dist: f64 },

    /// Fewer design points than the polynomial tail requires.
    #[error("insufficient design: {points} points, tail needs at least {needed}")]
    InsufficientDesign { points: usize, needed: usize },

    /// Dimension mismatch between a model or problem and an input vector.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A surrogate evaluator returned a non-finite value inside the subsolver.
    #[error("non-finite surrogate value at {x:?}")]
    NonFiniteSurrogate { x: Vec<f64> },

    /// A true function evaluation returned a non-finite value; the run aborts.
    #[error("non-finite true evaluation at {x:?} after {evals} evaluations")]
    NonFiniteEvaluation { x: Vec<f64>, evals: usize },

    /// Invalid subproblem specification.
    #[error("invalid subproblem: {0}")]
    InvalidSubproblem(String),

    /// Invalid run or experiment configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
