//! Solved tests, performance profiles and data profiles over collections of
//! run records, plus the plog impact ratio used to validate the online
//! transform decision.
//!
//! A problem counts as solved by a run once a feasible point comes within
//! `tau` of the reference objective `f_L`. The performance profile of a
//! solver is the fraction of problems it solves within a factor `alpha` of
//! the best solver's evaluation count; the data profile is the fraction
//! solved within a budget of `alpha (d+1)` evaluations.

use serde::{Deserialize, Serialize};

use crate::adjust::median;
use crate::cobra::RunRecord;

/// Convergence tolerance used throughout the benchmark experiments.
pub const SOLVED_TAU: f64 = 0.05;

/// Evaluations-to-solve for a grid of problems (rows) and solvers (columns);
/// `None` marks an unsolved cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveMatrix {
    pub evals_to_solve: Vec<Vec<Option<usize>>>,
    /// Dimension of each problem row.
    pub dims: Vec<usize>,
    pub tau: f64,
}

impl SolveMatrix {
    pub fn problems(&self) -> usize {
        self.evals_to_solve.len()
    }

    pub fn solvers(&self) -> usize {
        self.evals_to_solve.first().map_or(0, Vec::len)
    }
}

/// First evaluation index at which the record's best feasible objective
/// satisfies `f - f_l <= tau`; `None` when the run never gets there.
pub fn solved_at(record: &RunRecord, f_l: f64, tau: f64) -> Option<usize> {
    for row in &record.rows {
        if let Some(best) = row.best_f {
            if best - f_l <= tau {
                return Some(row.eval_index);
            }
        }
    }
    None
}

/// Fraction of problems on which solver `s` needs at most `alpha` times the
/// evaluations of the best solver. Zero for `alpha < 1` by definition.
pub fn performance_profile(matrix: &SolveMatrix, solver: usize, alpha: f64) -> f64 {
    if alpha < 1.0 || matrix.problems() == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    for row in &matrix.evals_to_solve {
        let Some(t) = row[solver] else { continue };
        let best = row.iter().flatten().min().copied().expect("t is finite");
        if (t as f64) <= alpha * best as f64 {
            hits += 1;
        }
    }
    hits as f64 / matrix.problems() as f64
}

/// Fraction of problems solver `s` solves within `alpha (d_p + 1)`
/// evaluations.
pub fn data_profile(matrix: &SolveMatrix, solver: usize, alpha: f64) -> f64 {
    if matrix.problems() == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    for (row, &d) in matrix.evals_to_solve.iter().zip(&matrix.dims) {
        if let Some(t) = row[solver] {
            if t as f64 <= alpha * (d + 1) as f64 {
                hits += 1;
            }
        }
    }
    hits as f64 / matrix.problems() as f64
}

/// A sampled profile: `(alpha, fraction)` pairs, non-decreasing in alpha.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[0].1 <= w[1].1 + 1e-12)
    }
}

/// Default alpha grid for data profiles: 1, 2, ..., 200.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=200).map(|a| a as f64).collect()
}

pub fn data_profile_curve(matrix: &SolveMatrix, solver: usize, alphas: &[f64]) -> ProfileCurve {
    ProfileCurve {
        points: alphas.iter().map(|&a| (a, data_profile(matrix, solver, a))).collect(),
    }
}

pub fn performance_profile_curve(
    matrix: &SolveMatrix,
    solver: usize,
    alphas: &[f64],
) -> ProfileCurve {
    ProfileCurve {
        points: alphas
            .iter()
            .map(|&a| (a, performance_profile(matrix, solver, a)))
            .collect(),
    }
}

/// CSV with one alpha column and one fraction column per named solver.
pub fn profiles_csv(names: &[String], curves: &[ProfileCurve]) -> String {
    let mut out = String::from("alpha");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let len = curves.first().map_or(0, |c| c.points.len());
    for i in 0..len {
        out.push_str(&format!("{}", curves[0].points[i].0));
        for curve in curves {
            out.push_str(&format!(",{}", curve.points[i].1));
        }
        out.push('\n');
    }
    out
}

/// Final error of a run against a known optimum; infinite when the run ended
/// without a feasible best.
pub fn final_error(record: &RunRecord, optimum: f64) -> f64 {
    match record.best_f {
        Some(f) => f - optimum,
        None => f64::INFINITY,
    }
}

/// Ratio of median final errors without and with the plog transform
/// (`> 1` means the transform helped). Runs with no feasible final best
/// enter the medians as infinity; equal medians give 1.
pub fn plog_impact_ratio(
    records_plain: &[RunRecord],
    records_plog: &[RunRecord],
    optimum: f64,
) -> f64 {
    assert!(!records_plain.is_empty() && !records_plog.is_empty());
    let plain: Vec<f64> = records_plain.iter().map(|r| final_error(r, optimum)).collect();
    let plogged: Vec<f64> = records_plog.iter().map(|r| final_error(r, optimum)).collect();
    let med_plain = median(&plain);
    let med_plog = median(&plogged);
    if med_plain == med_plog {
        1.0
    } else {
        med_plain / med_plog
    }
}

/// One-sided paired Wilcoxon signed-rank test with normal approximation:
/// p-value for the alternative "a tends to be smaller than b". Pairs with
/// zero difference are dropped; ties get average ranks.
pub fn wilcoxon_signed_rank_one_sided(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| d.abs() > 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return 0.5;
    }
    diffs.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap());
    // average ranks over ties on |d|
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    let mut tie_correction = 0.0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = avg_rank;
        }
        let t = (j - i + 1) as f64;
        tie_correction += t * t * t - t;
        i = j + 1;
    }
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_correction / 48.0;
    if var <= 0.0 {
        return if w_plus < mean { 0.0 } else { 1.0 };
    }
    // continuity-corrected z; small W+ favors the alternative
    let z = (w_plus + 0.5 - mean) / var.sqrt();
    normal_cdf(z)
}

/// Standard normal CDF via the Abramowitz & Stegun 7.1.26 erf approximation
/// (absolute error below 1.5e-7, plenty for rank tests).
fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}
