//! Surrogate-assisted constrained black-box optimization.
//!
//! This crate implements the COBRA iteration scheme (constrained optimization by
//! radial basis function approximation) together with the SACOBRA self-adjusting
//! extensions: input rescaling, constraint-range normalization, adaptive distance
//! requirement cycles, random restarts and an online log-transform of the fitness
//! function. It ships the G01--G11 constrained benchmark suite and the data/
//! performance-profile machinery used to evaluate derivative-free solvers.
//!
//! The pieces are organized along the data flow of one optimization run:
//!
//! * [`problems`] -- the constrained problem abstraction and the G-function suite,
//! * [`surrogate`] -- interpolating RBF models with polynomial tails,
//! * [`subsolver`] -- the derivative-free COBYLA-style solver for the surrogate
//!   subproblem of each iteration,
//! * [`cobra`] -- the COBRA main loop (initial design, fit, optimize, evaluate),
//! * [`adjust`] -- the SACOBRA self-adjusting elements layered on top of the loop,
//! * [`profiles`] -- solved-tests, data profiles and performance profiles over
//!   collections of run records.
//!
//! A complete SACOBRA run on a benchmark problem:
//!
//! ```
//! use sacobra_core::adjust::{run_sacobra, SacobraOptions};
//! use sacobra_core::cobra::CobraParams;
//! use sacobra_core::problems::g_suite;
//!
//! let problem = g_suite().remove(10); // G11
//! let mut params = CobraParams::defaults_for_dim(problem.dim());
//! params.budget = 50;
//! let record = run_sacobra(&problem, &params, &SacobraOptions::default(), 1).unwrap();
//! assert_eq!(record.rows.len(), 50);
//! ```

pub mod adjust;
pub mod cobra;
pub mod error;
pub mod problems;
pub mod profiles;
pub mod subsolver;
pub mod surrogate;

pub use error::Error;
