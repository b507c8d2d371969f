//! Per-(problem, variant) aggregation of run records: best-result order
//! statistics, evaluations-to-solve and infeasible-run counts.

use anyhow::Result;
use sacobra_core::adjust::median;
use sacobra_core::profiles::{solved_at, SOLVED_TAU};

use crate::experiment::CellResult;

/// One summary line. Quartiles use linear interpolation on the sorted final
/// best objectives; a run is infeasible when its final best solution is
/// infeasible (it then contributes nothing to the order statistics).
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub variant: String,
    pub runs: usize,
    pub optimum: Option<f64>,
    pub median_best: f64,
    pub best: f64,
    pub worst: f64,
    pub quartile_low: f64,
    pub quartile_high: f64,
    /// Mean evaluations-to-solve over the runs that solved (tau = 0.05
    /// against the known optimum).
    pub mean_evals_to_solve: Option<f64>,
    pub solved_runs: usize,
    pub infeasible_runs: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Aggregates executed cells into one row per (problem, variant).
pub fn summarize(cells: &[CellResult]) -> Result<SummaryTable> {
    let mut groups: Vec<(&str, &str)> = cells
        .iter()
        .map(|c| (c.problem.as_str(), c.variant.as_str()))
        .collect();
    groups.sort_unstable();
    groups.dedup();

    let mut rows = Vec::new();
    for (problem, variant) in groups {
        let members: Vec<&CellResult> = cells
            .iter()
            .filter(|c| c.problem == problem && c.variant == variant)
            .collect();
        let mut finals = Vec::new();
        let mut infeasible = 0usize;
        let mut optimum = None;
        let mut solves = Vec::new();
        for cell in &members {
            let Ok(record) = &cell.record else {
                infeasible += 1;
                continue;
            };
            optimum = optimum.or(record.optimum);
            match record.best_f {
                Some(f) => finals.push(f),
                None => infeasible += 1,
            }
            if let Some(opt) = record.optimum {
                if let Some(t) = solved_at(record, opt, SOLVED_TAU) {
                    solves.push(t as f64);
                }
            }
        }
        finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let row = SummaryRow {
            problem: problem.to_string(),
            variant: variant.to_string(),
            runs: members.len(),
            optimum,
            median_best: if finals.is_empty() { f64::NAN } else { median(&finals) },
            best: finals.first().copied().unwrap_or(f64::NAN),
            worst: finals.last().copied().unwrap_or(f64::NAN),
            quartile_low: quantile(&finals, 0.25),
            quartile_high: quantile(&finals, 0.75),
            mean_evals_to_solve: if solves.is_empty() {
                None
            } else {
                Some(solves.iter().sum::<f64>() / solves.len() as f64)
            },
            solved_runs: solves.len(),
            infeasible_runs: infeasible,
        };
        rows.push(row);
    }
    Ok(SummaryTable { rows })
}

impl SummaryTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "problem,variant,runs,optimum,median_best,best,worst,quartile_low,quartile_high,mean_evals_to_solve,solved_runs,infeasible_runs\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.problem,
                r.variant,
                r.runs,
                r.optimum.map(|v| v.to_string()).unwrap_or_default(),
                r.median_best,
                r.best,
                r.worst,
                r.quartile_low,
                r.quartile_high,
                r.mean_evals_to_solve.map(|v| v.to_string()).unwrap_or_default(),
                r.solved_runs,
                r.infeasible_runs,
            ));
        }
        out
    }

    pub fn row(&self, problem: &str, variant: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.problem == problem && r.variant == variant)
    }
}
