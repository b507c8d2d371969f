//! Experiment harness: runs (variant x problem x seed) grids of optimization
//! runs with reproducible per-cell seeds, persists every run record, and
//! aggregates summary tables and data/performance profiles.

pub mod config;
pub mod experiment;
pub mod summary;

pub use config::{parse_seed_spec, ExperimentConfig, Variant};
pub use experiment::{cell_seed, run_experiment, ExperimentOutcome};
pub use summary::{summarize, SummaryRow, SummaryTable};
