//! Experiment configuration: named solver variants and a line-oriented
//! `key = value` config file with command-line overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use sacobra_core::adjust::{PlogMode, SacobraOptions};
use sacobra_core::surrogate::KernelKind;

/// A named ablation of the self-adjusting algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub options: SacobraOptions,
}

impl Variant {
    /// Parses a variant name. `full` is the complete algorithm, `cobra-r`
    /// switches every element off, `no-<element>` drops a single element
    /// (`rescale`, `acf`, `adrc`, `rs`, `aff`), and `plog-always` /
    /// `plog-never` force the fitness transform.
    pub fn from_name(name: &str) -> Result<Self> {
        let options = match name {
            "full" | "sacobra" => SacobraOptions::default(),
            "cobra-r" => SacobraOptions::all_off(),
            "cobra-r-rescale" => SacobraOptions { rescale: true, ..SacobraOptions::all_off() },
            "no-rescale" => SacobraOptions { rescale: false, ..Default::default() },
            "no-acf" => SacobraOptions { acf: false, ..Default::default() },
            "no-adrc" => SacobraOptions { adrc: false, ..Default::default() },
            "no-rs" => SacobraOptions { random_start: false, ..Default::default() },
            "no-aff" => SacobraOptions { plog: PlogMode::Never, ..Default::default() },
            "plog-always" => SacobraOptions { plog: PlogMode::Always, ..Default::default() },
            "plog-never" => SacobraOptions { plog: PlogMode::Never, ..Default::default() },
            other => bail!("unknown variant '{other}'"),
        };
        Ok(Self { name: name.to_string(), options })
    }

    /// Stable signature string (enters the per-cell seed derivation).
    pub fn signature(&self) -> String {
        let o = &self.options;
        let plog = match o.plog {
            PlogMode::Adaptive => "adaptive",
            PlogMode::Never => "never",
            PlogMode::Always => "always",
        };
        format!(
            "rescale={},acf={},adrc={},rs={},plog={}",
            o.rescale, o.acf, o.adrc, o.random_start, plog
        )
    }
}

/// Full description of one experiment grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Problem names from the built-in suite (`G01` .. `G11`, `G02-20d`), or
    /// `gsuite` for all eleven.
    pub problems: Vec<String>,
    pub seeds: Vec<u64>,
    /// True-evaluation budget per run.
    pub budget: usize,
    /// Solver variants to compare.
    pub variants: Vec<Variant>,
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub kernel: KernelKind,
    /// Per-problem budget overrides, e.g. from `budget.G01 = 100` lines.
    pub budget_overrides: BTreeMap<String, usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: vec!["gsuite".into()],
            seeds: (1..=10).collect(),
            budget: 500,
            variants: vec![Variant::from_name("full").unwrap()],
            out_dir: default_out_root().join("experiment"),
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            kernel: KernelKind::Cubic,
            budget_overrides: BTreeMap::new(),
        }
    }
}

/// Output root: `$SACOBRA_OUT_ROOT` or `./runs`.
pub fn default_out_root() -> PathBuf {
    std::env::var_os("SACOBRA_OUT_ROOT").map_or_else(|| PathBuf::from("runs"), PathBuf::from)
}

impl ExperimentConfig {
    /// Parses a line-oriented `key = value` config file. `#` starts a
    /// comment. Unknown keys are rejected.
    pub fn from_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected 'key = value', got '{raw}'", lineno + 1);
            };
            cfg.set(key.trim(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_str(&text)
    }

    /// Applies one `key = value` setting (also used for CLI overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problems" => {
                self.problems = value.split(',').map(|s| s.trim().to_string()).collect();
            }
            "seeds" => self.seeds = parse_seed_spec(value)?,
            "budget" => self.budget = value.parse().context("budget")?,
            "variants" => {
                self.variants = value
                    .split(',')
                    .map(|s| Variant::from_name(s.trim()))
                    .collect::<Result<_>>()?;
            }
            "out" => self.out_dir = default_out_root().join(value),
            "parallelism" => self.parallelism = value.parse().context("parallelism")?,
            "kernel" => {
                self.kernel = match value {
                    "cubic" => KernelKind::Cubic,
                    other => {
                        if let Some(width) = other.strip_prefix("gaussian:") {
                            KernelKind::Gaussian { width: width.parse().context("kernel width")? }
                        } else {
                            bail!("unknown kernel '{other}'")
                        }
                    }
                };
            }
            _ => {
                if let Some(problem) = key.strip_prefix("budget.") {
                    self.budget_overrides.insert(problem.to_string(), value.parse()?);
                } else {
                    bail!("unknown config key '{key}'");
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            bail!("no problems configured");
        }
        if self.seeds.is_empty() {
            bail!("empty seed list");
        }
        if self.variants.is_empty() {
            bail!("no variants configured");
        }
        if self.parallelism == 0 {
            bail!("parallelism must be positive");
        }
        Ok(())
    }

    pub fn budget_for(&self, problem: &str) -> usize {
        *self.budget_overrides.get(problem).unwrap_or(&self.budget)
    }
}

/// Parses `1..10` (inclusive range) or a comma list `1,2,5`.
pub fn parse_seed_spec(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u64 = a.trim().parse().context("seed range start")?;
        let hi: u64 = b.trim().parse().context("seed range end")?;
        if hi < lo {
            bail!("empty seed range {spec}");
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(Into::into))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_text() {
        let cfg = ExperimentConfig::from_str(
            "# comment\nproblems = G05, G11\nseeds = 1..3\nbudget = 120\nvariants = full, cobra-r\nbudget.G11 = 60\n",
        )
        .unwrap();
        assert_eq!(cfg.problems, vec!["G05", "G11"]);
        assert_eq!(cfg.seeds, vec![1, 2, 3]);
        assert_eq!(cfg.budget_for("G05"), 120);
        assert_eq!(cfg.budget_for("G11"), 60);
        assert_eq!(cfg.variants.len(), 2);
        assert!(!cfg.variants[1].options.rescale);
    }

    #[test]
    fn rejects_unknown_keys_and_empty_seeds() {
        assert!(ExperimentConfig::from_str("frobnicate = 1\n").is_err());
        assert!(ExperimentConfig::from_str("seeds = \n").is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.seeds.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn seed_specs() {
        assert_eq!(parse_seed_spec("4..6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_seed_spec("7, 9").unwrap(), vec![7, 9]);
        assert!(parse_seed_spec("9..4").is_err());
    }

    #[test]
    fn variant_signatures_differ() {
        let names = ["full", "cobra-r", "no-rescale", "no-acf", "no-adrc", "no-rs", "no-aff", "plog-always"];
        let sigs: std::collections::BTreeSet<String> = names
            .iter()
            .map(|n| Variant::from_name(n).unwrap().signature())
            .collect();
        // plog-never aliases no-aff; all others are distinct
        assert_eq!(sigs.len(), names.len());
    }
}
