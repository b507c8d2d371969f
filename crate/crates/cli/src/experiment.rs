//! Grid execution: one deterministic run per (variant, problem, seed) cell,
//! records written as CSV + JSON per cell, with a summary table and data
//! profiles at the top level.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use sacobra_core::adjust::run_sacobra;
use sacobra_core::cobra::{CobraParams, RunRecord};
use sacobra_core::problems::{g_suite, g_suite_with_g02_20d, Problem};
use sacobra_core::profiles::{
    data_profile_curve, default_alpha_grid, profiles_csv, solved_at, SolveMatrix, SOLVED_TAU,
};

use crate::config::{ExperimentConfig, Variant};
use crate::summary::{summarize, SummaryTable};

/// FNV-1a over the cell identity: the per-cell seed depends only on problem
/// name, seed integer and ablation signature, so re-runs (and reordered
/// grids) reproduce records exactly.
pub fn cell_seed(problem: &str, seed: u64, signature: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in problem
        .bytes()
        .chain([b'|'])
        .chain(seed.to_le_bytes())
        .chain([b'|'])
        .chain(signature.bytes())
    {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// One executed cell.
pub struct CellResult {
    pub variant: String,
    pub problem: String,
    pub seed: u64,
    pub record: Result<RunRecord, String>,
}

/// Everything an experiment produces in memory.
pub struct ExperimentOutcome {
    pub cells: Vec<CellResult>,
    pub summary: SummaryTable,
    pub failed_cells: usize,
}

/// Resolves configured problem names against the built-in suite.
pub fn resolve_problems(names: &[String]) -> Result<Vec<Problem>> {
    let mut out = Vec::new();
    for name in names {
        if name == "gsuite" {
            out.extend(g_suite());
            continue;
        }
        let found = g_suite_with_g02_20d().into_iter().find(|p| p.name() == *name);
        match found {
            Some(p) => out.push(p),
            None => bail!("unknown problem '{name}'"),
        }
    }
    Ok(out)
}

fn run_cell(problem: &Problem, variant: &Variant, seed: u64, config: &ExperimentConfig) -> CellResult {
    let mut params = if variant.options.rescale {
        CobraParams::defaults_for_dim(problem.dim())
    } else {
        CobraParams::defaults_for(problem)
    };
    params.budget = config.budget_for(problem.name());
    params.kernel = config.kernel;
    let derived = cell_seed(problem.name(), seed, &variant.signature());
    let record = run_sacobra(problem, &params, &variant.options, derived)
        .map_err(|e| e.to_string());
    CellResult { variant: variant.name.clone(), problem: problem.name().to_string(), seed, record }
}

/// Executes the full grid in a worker pool and writes all outputs under
/// `config.out_dir`. Partial failures are recorded per cell without aborting
/// the grid.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let problems = resolve_problems(&config.problems)?;

    let mut grid: Vec<(usize, usize, u64)> = Vec::new();
    for (vi, _) in config.variants.iter().enumerate() {
        for (pi, _) in problems.iter().enumerate() {
            for &seed in &config.seeds {
                grid.push((vi, pi, seed));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .context("building worker pool")?;
    let cells: Vec<CellResult> = pool.install(|| {
        grid.par_iter()
            .map(|&(vi, pi, seed)| run_cell(&problems[pi], &config.variants[vi], seed, config))
            .collect()
    });

    // single-writer collection of all artifacts
    std::fs::create_dir_all(&config.out_dir)?;
    let mut failed = 0usize;
    for cell in &cells {
        let dir = config.out_dir.join(format!("{}__{}", cell.problem, cell.variant));
        std::fs::create_dir_all(&dir)?;
        match &cell.record {
            Ok(record) => {
                let csv = std::fs::File::create(dir.join(format!("seed_{}.csv", cell.seed)))?;
                record.write_csv(std::io::BufWriter::new(csv))?;
                let json = serde_json::to_string_pretty(&record.to_json())?;
                std::fs::write(dir.join(format!("seed_{}.json", cell.seed)), json)?;
            }
            Err(message) => {
                failed += 1;
                std::fs::write(
                    dir.join(format!("seed_{}.failed.txt", cell.seed)),
                    message,
                )?;
            }
        }
    }

    let summary = summarize(&cells)?;
    std::fs::write(config.out_dir.join("summary.csv"), summary.to_csv())?;
    write_profiles(&cells, &problems, config, &config.out_dir.join("profiles.csv"))?;

    Ok(ExperimentOutcome { cells, summary, failed_cells: failed })
}

/// Builds the (problem x seed) data-profile matrix, one column per variant,
/// treating every (problem, seed) pair as its own profile problem.
pub fn solve_matrix(cells: &[CellResult], problems: &[Problem]) -> SolveMatrix {
    let mut variants: Vec<&str> = cells.iter().map(|c| c.variant.as_str()).collect();
    variants.sort_unstable();
    variants.dedup();
    let mut keys: Vec<(&str, u64)> = cells
        .iter()
        .map(|c| (c.problem.as_str(), c.seed))
        .collect();
    keys.sort_unstable();
    keys.dedup();

    let dim_of = |name: &str| {
        problems
            .iter()
            .find(|p| p.name() == name)
            .map(|p| p.dim())
            .unwrap_or(0)
    };
    let optimum_of = |name: &str| {
        problems
            .iter()
            .find(|p| p.name() == name)
            .and_then(|p| p.optimum_value())
    };

    let mut evals = vec![vec![None; variants.len()]; keys.len()];
    for cell in cells {
        let Ok(record) = &cell.record else { continue };
        let Some(optimum) = optimum_of(&cell.problem) else { continue };
        let row = keys
            .binary_search(&(cell.problem.as_str(), cell.seed))
            .expect("cell key present");
        let col = variants
            .binary_search(&cell.variant.as_str())
            .expect("variant present");
        evals[row][col] = solved_at(record, optimum, SOLVED_TAU);
    }
    SolveMatrix {
        evals_to_solve: evals,
        dims: keys.iter().map(|(p, _)| dim_of(p)).collect(),
        tau: SOLVED_TAU,
    }
}

fn write_profiles(
    cells: &[CellResult],
    problems: &[Problem],
    _config: &ExperimentConfig,
    path: &Path,
) -> Result<()> {
    let mut variants: Vec<String> = cells.iter().map(|c| c.variant.clone()).collect();
    variants.sort();
    variants.dedup();
    let matrix = solve_matrix(cells, problems);
    let alphas = default_alpha_grid();
    let curves: Vec<_> = (0..variants.len())
        .map(|s| data_profile_curve(&matrix, s, &alphas))
        .collect();
    let mut file = std::fs::File::create(path)?;
    file.write_all(profiles_csv(&variants, &curves).as_bytes())?;
    Ok(())
}
