//! Command-line experiment runner for the surrogate-assisted constrained
//! optimization toolkit.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sacobra_cli::config::{default_out_root, parse_seed_spec, ExperimentConfig, Variant};
use sacobra_cli::experiment::{resolve_problems, run_experiment, solve_matrix, CellResult};
use sacobra_cli::summary::summarize;
use sacobra_core::cobra::RunRecord;
use sacobra_core::problems::{characterize, characteristics_csv_row, CHARACTERISTICS_CSV_HEADER};
use sacobra_core::profiles::{data_profile_curve, default_alpha_grid, profiles_csv};
use sacobra_core::surrogate::{demo_plog_benefit_curves, demo_scaling_pitfall_curves};

#[derive(Parser)]
#[command(name = "sacobra", about = "Surrogate-assisted constrained optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (variant x problem x seed) experiment grid.
    Run {
        /// Config file (line-oriented `key = value`).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed list or range, e.g. `1..30` or `1,2,7`.
        #[arg(long)]
        seeds: Option<String>,
        /// Evaluation budget per run.
        #[arg(long)]
        budget: Option<usize>,
        /// Comma list of problems (or `gsuite`).
        #[arg(long)]
        problems: Option<String>,
        /// Elements to switch off in a single ablated variant
        /// (comma list of rescale,acf,adrc,rs,aff).
        #[arg(long)]
        ablate: Option<String>,
        /// Variant names to run (overrides --ablate).
        #[arg(long)]
        variants: Option<String>,
        /// Output directory (under the output root).
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        parallelism: Option<usize>,
    },
    /// Recompute the summary table from persisted run records.
    Summarize {
        /// Directory written by `run`.
        dir: PathBuf,
    },
    /// Recompute data profiles from persisted run records.
    Profile {
        dir: PathBuf,
    },
    /// Monte-Carlo problem characterization (feasibility rate, ranges).
    Characterize {
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma list of problems (default: the whole suite).
        #[arg(long)]
        problems: Option<String>,
    },
    /// Numerical-pitfall demonstrations (input scaling, plog transform).
    DemoPitfalls {
        /// Directory for the prediction-curve CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_ablated_variant(spec: &str) -> Result<Variant> {
    let mut options = sacobra_core::adjust::SacobraOptions::default();
    for element in spec.split(',') {
        match element.trim().to_ascii_lowercase().as_str() {
            "rescale" => options.rescale = false,
            "acf" => options.acf = false,
            "adrc" => options.adrc = false,
            "rs" => options.random_start = false,
            "aff" => options.plog = sacobra_core::adjust::PlogMode::Never,
            other => bail!("unknown ablation element '{other}'"),
        }
    }
    Ok(Variant { name: format!("ablate-{}", spec.replace(',', "-")), options })
}

fn cmd_run(
    config: Option<PathBuf>,
    seeds: Option<String>,
    budget: Option<usize>,
    problems: Option<String>,
    ablate: Option<String>,
    variants: Option<String>,
    out: Option<String>,
    parallelism: Option<usize>,
) -> Result<i32> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::from_file(&path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seeds {
        cfg.seeds = parse_seed_spec(&s)?;
    }
    if let Some(b) = budget {
        cfg.budget = b;
    }
    if let Some(p) = problems {
        cfg.set("problems", &p)?;
    }
    if let Some(v) = variants {
        cfg.set("variants", &v)?;
    } else if let Some(a) = ablate {
        cfg.variants = vec![build_ablated_variant(&a)?];
    }
    if let Some(o) = out {
        cfg.set("out", &o)?;
    }
    if let Some(par) = parallelism {
        cfg.parallelism = par;
    }

    let outcome = run_experiment(&cfg)?;
    println!("{}", outcome.summary.to_csv());
    println!(
        "wrote {} records to {} ({} failed cells)",
        outcome.cells.len(),
        cfg.out_dir.display(),
        outcome.failed_cells
    );
    Ok(if outcome.failed_cells > 0 { 1 } else { 0 })
}

/// Reads every persisted record under `<dir>/<problem>__<variant>/seed_*.json`.
fn load_cells(dir: &PathBuf) -> Result<Vec<CellResult>> {
    let mut cells = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let entry = entry?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let dirname = entry.file_name().to_string_lossy().into_owned();
        let Some((problem, variant)) = dirname.split_once("__") else { continue };
        for file in std::fs::read_dir(entry.path())? {
            let file = file?;
            let name = file.file_name().to_string_lossy().into_owned();
            let Some(seed_str) = name.strip_prefix("seed_").and_then(|s| s.strip_suffix(".json"))
            else {
                continue;
            };
            let text = std::fs::read_to_string(file.path())?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let record = RunRecord::from_json(&value)?;
            cells.push(CellResult {
                variant: variant.to_string(),
                problem: problem.to_string(),
                seed: seed_str.parse()?,
                record: Ok(record),
            });
        }
    }
    if cells.is_empty() {
        bail!("no run records under {}", dir.display());
    }
    Ok(cells)
}

fn cmd_summarize(dir: PathBuf) -> Result<()> {
    let cells = load_cells(&dir)?;
    let table = summarize(&cells)?;
    print!("{}", table.to_csv());
    Ok(())
}

fn cmd_profile(dir: PathBuf) -> Result<()> {
    let cells = load_cells(&dir)?;
    let names: Vec<String> = {
        let mut v: Vec<String> = cells.iter().map(|c| c.variant.clone()).collect();
        v.sort();
        v.dedup();
        v
    };
    let problems = resolve_problems(&["gsuite".into(), "G02-20d".into()])?;
    let matrix = solve_matrix(&cells, &problems);
    let alphas = default_alpha_grid();
    let curves: Vec<_> = (0..names.len()).map(|s| data_profile_curve(&matrix, s, &alphas)).collect();
    print!("{}", profiles_csv(&names, &curves));
    Ok(())
}

fn cmd_characterize(samples: usize, seed: u64, problems: Option<String>) -> Result<()> {
    let names: Vec<String> = match problems {
        Some(p) => p.split(',').map(|s| s.trim().to_string()).collect(),
        None => vec!["gsuite".into()],
    };
    let problems = resolve_problems(&names)?;
    println!("{CHARACTERISTICS_CSV_HEADER}");
    for problem in &problems {
        let c = characterize(problem, samples, seed)?;
        println!("{}", characteristics_csv_row(problem, &c));
    }
    Ok(())
}

fn cmd_demo_pitfalls(out: Option<PathBuf>) -> Result<()> {
    for scale in [1.0, 1e3, 1e4] {
        let (raw, rescaled, curve) = demo_scaling_pitfall_curves(scale);
        println!("scaling S={scale:>7}: rmse_raw={raw:.6e} rmse_rescaled={rescaled:.6e}");
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir)?;
            let file = std::fs::File::create(dir.join(format!("scaling_S{scale}.csv")))?;
            curve.write_csv(std::io::BufWriter::new(file))?;
        }
    }
    let (direct, plogged, curve) = demo_plog_benefit_curves();
    println!("plog transform: rmse_direct={direct:.6e} rmse_plog={plogged:.6e}");
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join("plog_benefit.csv"))?;
        curve.write_csv(std::io::BufWriter::new(file))?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, seeds, budget, problems, ablate, variants, out, parallelism } => {
            cmd_run(config, seeds, budget, problems, ablate, variants, out, parallelism)?
        }
        Command::Summarize { dir } => {
            cmd_summarize(dir)?;
            0
        }
        Command::Profile { dir } => {
            cmd_profile(dir)?;
            0
        }
        Command::Characterize { samples, seed, problems } => {
            cmd_characterize(samples, seed, problems)?;
            0
        }
        Command::DemoPitfalls { out } => {
            cmd_demo_pitfalls(out)?;
            0
        }
    };
    std::process::exit(code);
}
