//! Constrained problem abstraction and the G01--G11 benchmark suite.
//!
//! Every problem is a box-bounded minimization with inequality constraints in
//! the `g_i(x) <= 0` convention. Suite problems that are stated as
//! maximizations in the literature are negated at definition time, and
//! equality constraints are converted to one-sided inequalities with a fixed
//! per-problem direction (the side of the hyperplane on which the objective
//! increases), so the converted problem keeps the published optimum.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::json;

use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Slack allowed on box bounds when evaluating (guards rounding in affine maps).
pub const BOUNDS_SLACK: f64 = 1e-12;

/// Constraint tolerance used when auditing published optima (covers converted
/// equalities given to finite precision).
pub const OPTIMUM_FEASIBILITY_TOL: f64 = 1e-4;

/// Static descriptive facts about a suite problem (benchmark bookkeeping, not
/// used by the optimizer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ConstraintCounts {
    /// Linear inequalities.
    pub linear_inequalities: usize,
    /// Nonlinear inequalities.
    pub nonlinear_inequalities: usize,
    /// Nonlinear equalities in the original formulation (now converted).
    pub nonlinear_equalities: usize,
    /// Constraints active at the optimum.
    pub active_at_optimum: usize,
}

/// A box-bounded constrained minimization problem.
///
/// Immutable after construction; evaluation is reentrant and safe to call
/// from concurrent runs.
#[derive(Clone)]
pub struct Problem {
    name: String,
    dim: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Evaluator,
    constraints: Vec<Evaluator>,
    optimum_value: Option<f64>,
    optimum_point: Option<Vec<f64>>,
    objective_label: &'static str,
    counts: ConstraintCounts,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("constraints", &self.constraints.len())
            .field("optimum_value", &self.optimum_value)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        objective: Evaluator,
        constraints: Vec<Evaluator>,
    ) -> Result<Self> {
        let name = name.into();
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidProblem(format!(
                "{name}: bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for i in 0..lower.len() {
            if !(lower[i] < upper[i]) {
                return Err(Error::InvalidProblem(format!(
                    "{name}: lower[{i}] = {} not below upper[{i}] = {}",
                    lower[i], upper[i]
                )));
            }
        }
        let dim = lower.len();
        Ok(Self {
            name,
            dim,
            lower,
            upper,
            objective,
            constraints,
            optimum_value: None,
            optimum_point: None,
            objective_label: "unknown",
            counts: ConstraintCounts {
                linear_inequalities: 0,
                nonlinear_inequalities: 0,
                nonlinear_equalities: 0,
                active_at_optimum: 0,
            },
        })
    }

    pub fn with_optimum(mut self, value: f64, point: Option<Vec<f64>>) -> Self {
        self.optimum_value = Some(value);
        self.optimum_point = point;
        self
    }

    fn with_facts(mut self, label: &'static str, counts: ConstraintCounts) -> Self {
        self.objective_label = label;
        self.counts = counts;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn optimum_value(&self) -> Option<f64> {
        self.optimum_value
    }

    pub fn optimum_point(&self) -> Option<&[f64]> {
        self.optimum_point.as_deref()
    }

    /// Objective-shape label from the benchmark literature (descriptive only).
    pub fn objective_label(&self) -> &'static str {
        self.objective_label
    }

    pub fn constraint_counts(&self) -> ConstraintCounts {
        self.counts
    }

    /// Evaluates objective and all constraints at `x` (one true evaluation).
    ///
    /// Errors with the offending coordinate when `x` leaves the box by more
    /// than [`BOUNDS_SLACK`].
    pub fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        for i in 0..self.dim {
            if x[i] < self.lower[i] - BOUNDS_SLACK || x[i] > self.upper[i] + BOUNDS_SLACK {
                return Err(Error::BoundsViolation {
                    index: i,
                    value: x[i],
                    lower: self.lower[i],
                    upper: self.upper[i],
                });
            }
        }
        let f = (self.objective)(x);
        let g = self.constraints.iter().map(|c| c(x)).collect();
        Ok((f, g))
    }

    /// Replaces objective and constraints by compositions with `map`, keeping
    /// everything else. Used by input rescaling.
    pub fn composed_with(
        &self,
        name: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        map: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
        optimum_point: Option<Vec<f64>>,
    ) -> Result<Self> {
        let obj = self.objective.clone();
        let m = map.clone();
        let objective: Evaluator = Arc::new(move |x| obj(&m(x)));
        let constraints: Vec<Evaluator> = self
            .constraints
            .iter()
            .map(|c| {
                let c = c.clone();
                let m = map.clone();
                let e: Evaluator = Arc::new(move |x: &[f64]| c(&m(x)));
                e
            })
            .collect();
        let mut p = Problem::new(name, lower, upper, objective, constraints)?;
        p.optimum_value = self.optimum_value;
        p.optimum_point = optimum_point;
        p.objective_label = self.objective_label;
        p.counts = self.counts;
        Ok(p)
    }
}

/// Which inequality replaces an equality constraint `h(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EqualityDirection {
    /// Keep `h(x) <= 0`.
    Le,
    /// Keep `-h(x) <= 0`, i.e. `h(x) >= 0`.
    Ge,
}

/// Converts equality evaluators into inequality evaluators with the given
/// per-equality directions.
pub fn convert_equalities(
    equalities: Vec<Evaluator>,
    directions: &[EqualityDirection],
) -> Result<Vec<Evaluator>> {
    if directions.len() != equalities.len() {
        return Err(Error::MissingDirection {
            want: equalities.len(),
            got: directions.len(),
        });
    }
    Ok(equalities
        .into_iter()
        .zip(directions)
        .map(|(h, dir)| match dir {
            EqualityDirection::Le => h,
            EqualityDirection::Ge => {
                let e: Evaluator = Arc::new(move |x: &[f64]| -h(x));
                e
            }
        })
        .collect())
}

/// Monte-Carlo characterization of a problem (feasibility rate, fitness
/// range, constraint range ratio).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ProblemCharacteristics {
    /// Fraction of uniform box samples satisfying every constraint.
    pub feasibility_rate: f64,
    /// `max f - min f` over the samples.
    pub fitness_range: f64,
    /// Largest constraint range divided by smallest constraint range
    /// (`+inf` with `degenerate_range` set if some constraint is constant).
    pub constraint_range_ratio: f64,
    pub sample_count: usize,
    pub seed: u64,
    /// True when a constraint had zero sampled range.
    pub degenerate_range: bool,
}

/// Estimates [`ProblemCharacteristics`] from `n_samples` uniform samples.
pub fn characterize(problem: &Problem, n_samples: usize, seed: u64) -> Result<ProblemCharacteristics> {
    if n_samples < 1000 {
        return Err(Error::InvalidConfig(format!(
            "characterize needs at least 1000 samples, got {n_samples}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let d = problem.dim();
    let m = problem.constraint_count();
    let mut feasible = 0usize;
    let mut f_min = f64::INFINITY;
    let mut f_max = f64::NEG_INFINITY;
    let mut g_min = vec![f64::INFINITY; m];
    let mut g_max = vec![f64::NEG_INFINITY; m];
    let mut x = vec![0.0; d];
    for _ in 0..n_samples {
        for i in 0..d {
            x[i] = problem.lower[i] + (problem.upper[i] - problem.lower[i]) * rng.random::<f64>();
        }
        let f = (problem.objective)(&x);
        if f.is_finite() {
            f_min = f_min.min(f);
            f_max = f_max.max(f);
        }
        let mut all_ok = true;
        for (i, c) in problem.constraints.iter().enumerate() {
            let v = c(&x);
            g_min[i] = g_min[i].min(v);
            g_max[i] = g_max[i].max(v);
            if v > 0.0 {
                all_ok = false;
            }
        }
        if all_ok {
            feasible += 1;
        }
    }
    let mut degenerate = false;
    let ratio = if m == 0 {
        1.0
    } else {
        let mut largest = 0.0f64;
        let mut smallest = f64::INFINITY;
        for i in 0..m {
            let range = g_max[i] - g_min[i];
            largest = largest.max(range);
            smallest = smallest.min(range);
        }
        if smallest <= 0.0 {
            degenerate = true;
            f64::INFINITY
        } else {
            largest / smallest
        }
    };
    Ok(ProblemCharacteristics {
        feasibility_rate: feasible as f64 / n_samples as f64,
        fitness_range: f_max - f_min,
        constraint_range_ratio: ratio,
        sample_count: n_samples,
        seed,
        degenerate_range: degenerate,
    })
}

pub const CHARACTERISTICS_CSV_HEADER: &str = "problem,dim,type,feasibility_rate_pct,fitness_range,constraint_range_ratio,linear_ineq,nonlinear_ineq,nonlinear_eq,active_at_optimum";

/// One CSV row in benchmark-table column order.
pub fn characteristics_csv_row(problem: &Problem, c: &ProblemCharacteristics) -> String {
    let k = problem.constraint_counts();
    format!(
        "{},{},{},{:.6},{:.6e},{:.6e},{},{},{},{}",
        problem.name(),
        problem.dim(),
        problem.objective_label(),
        100.0 * c.feasibility_rate,
        c.fitness_range,
        c.constraint_range_ratio,
        k.linear_inequalities,
        k.nonlinear_inequalities,
        k.nonlinear_equalities,
        k.active_at_optimum,
    )
}

/// JSON manifest of a problem list: name, dimension, bounds, constraint
/// counts and optimum.
pub fn suite_manifest(problems: &[Problem]) -> serde_json::Value {
    json!(problems
        .iter()
        .map(|p| {
            json!({
                "name": p.name(),
                "dim": p.dim(),
                "lower": p.lower(),
                "upper": p.upper(),
                "constraints": p.constraint_count(),
                "counts": p.constraint_counts(),
                "objective_type": p.objective_label(),
                "optimum_value": p.optimum_value(),
                "optimum_point": p.optimum_point(),
            })
        })
        .collect::<Vec<_>>())
}

mod gsuite;
pub use gsuite::{g02_with_dim, g_suite, g_suite_with_g02_20d};
