//! The COBRA main loop: initial design, per-iteration surrogate fits for
//! objective and constraints, subproblem assembly, distance-requirement
//! cycling, epsilon-margin adaptation and best-solution bookkeeping.
//!
//! One run is strictly sequential (each infill depends on the previous
//! evaluation); independent runs are embarrassingly parallel.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::subsolver::{self, SubproblemSpec};
use crate::surrogate::{KernelKind, RbfFactorization, SurrogateModel, TailKind};

/// Parameters of one COBRA run (the published default setting).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CobraParams {
    /// Initial design size (default `3 d`).
    pub n_init: usize,
    /// Total true-evaluation budget `N_max` (initial design included).
    pub budget: usize,
    /// Starting constraint margin, `0.005 l` with `l` the smallest box side.
    pub eps_init: f64,
    /// Margin cap, `0.01 l`.
    pub eps_max: f64,
    /// Smallest side of the search box (2 after rescaling to `[-1,1]`).
    pub box_min_side: f64,
    /// Feasible-infill count that halves the margin (`floor(2 sqrt(d))`).
    pub t_feas: usize,
    /// Infeasible-infill count that doubles the margin (`floor(2 sqrt(d))`).
    pub t_infeas: usize,
    /// Distance requirement cycle.
    pub drc: Vec<f64>,
    pub kernel: KernelKind,
    pub tail: TailKind,
    /// Subsolver budget per iteration, in evaluations per dimension.
    pub inner_evals_per_dim: usize,
    /// Subsolver convergence tolerance (final trust radius).
    pub inner_tol: f64,
    /// Anchor the active fitness transform at the population minimum
    /// (`plog(f - min f)` instead of `plog(f)`), so the model keeps full
    /// resolution around the incumbent. The transform stays monotone, so the
    /// subproblem minimizer is unchanged.
    pub plog_shift_to_min: bool,
}

/// The large distance-requirement cycle (exploration-heavy).
pub const DRC_LARGE: [f64; 5] = [0.3, 0.05, 0.001, 0.0005, 0.0];
/// The small distance-requirement cycle, for steep objectives.
pub const DRC_SMALL: [f64; 2] = [0.001, 0.0];

impl CobraParams {
    /// Defaults for a `d`-dimensional problem on the rescaled `[-1, 1]` box.
    pub fn defaults_for_dim(d: usize) -> Self {
        Self::defaults_for_box(d, 2.0)
    }

    /// Defaults for a `d`-dimensional problem whose smallest box side is `l`.
    pub fn defaults_for_box(d: usize, l: f64) -> Self {
        let t = (2.0 * (d as f64).sqrt()).floor() as usize;
        Self {
            n_init: 3 * d,
            budget: 500,
            eps_init: 0.005 * l,
            eps_max: 0.01 * l,
            box_min_side: l,
            t_feas: t,
            t_infeas: t,
            drc: DRC_LARGE.to_vec(),
            kernel: KernelKind::Cubic,
            tail: TailKind::LinearPlusSquares,
            inner_evals_per_dim: 200,
            inner_tol: 1e-6,
            plog_shift_to_min: true,
        }
    }

    /// Defaults matched to a concrete problem box.
    pub fn defaults_for(problem: &Problem) -> Self {
        let l = problem
            .lower()
            .iter()
            .zip(problem.upper())
            .map(|(a, b)| b - a)
            .fold(f64::INFINITY, f64::min);
        Self::defaults_for_box(problem.dim(), l)
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.n_init < d + 1 {
            return Err(Error::InvalidConfig(format!(
                "n_init = {} below d+1 = {}",
                self.n_init,
                d + 1
            )));
        }
        if self.budget <= self.n_init {
            return Err(Error::InvalidConfig(format!(
                "budget {} does not exceed n_init {}",
                self.budget, self.n_init
            )));
        }
        if !(0.0 <= self.eps_init && self.eps_init <= self.eps_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= eps_init ({}) <= eps_max ({})",
                self.eps_init, self.eps_max
            )));
        }
        if self.drc.is_empty() {
            return Err(Error::InvalidConfig("empty distance requirement cycle".into()));
        }
        Ok(())
    }
}

/// One evaluated population member (raw objective and constraint values).
#[derive(Debug, Clone)]
pub struct Member {
    pub x: Vec<f64>,
    pub f: f64,
    pub g: Vec<f64>,
}

impl Member {
    pub fn max_violation(&self) -> f64 {
        self.g.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_feasible(&self) -> bool {
        self.g.iter().all(|&v| v <= 0.0)
    }
}

/// Mutable state of one COBRA run.
#[derive(Debug, Clone)]
pub struct CobraState {
    pub population: Vec<Member>,
    /// Ever-best feasible point and its objective.
    pub best: Option<(Vec<f64>, f64)>,
    /// Current constraint margin, within `[0, eps_max]`.
    pub eps: f64,
    pub c_feas: usize,
    pub c_infeas: usize,
    /// Infill iterations completed (drives the distance requirement cycle).
    pub iteration: usize,
}

impl CobraState {
    fn new(eps_init: f64) -> Self {
        Self {
            population: Vec::new(),
            best: None,
            eps: eps_init,
            c_feas: 0,
            c_infeas: 0,
            iteration: 0,
        }
    }

    pub fn feasible_fraction(&self) -> f64 {
        if self.population.is_empty() {
            return 0.0;
        }
        let feas = self.population.iter().filter(|m| m.is_feasible()).count();
        feas as f64 / self.population.len() as f64
    }

    /// Population member with the smallest maximum constraint violation
    /// (start-point fallback before any feasible point exists).
    pub fn least_violating(&self) -> &Member {
        self.population
            .iter()
            .min_by(|a, b| {
                a.max_violation()
                    .partial_cmp(&b.max_violation())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("population never empty after init")
    }

    /// Appends the evaluated point and replaces the best solution iff the new
    /// point is feasible and strictly better.
    pub fn update_best(&mut self, x: Vec<f64>, f: f64, g: Vec<f64>) {
        let member = Member { x, f, g };
        let improves = member.is_feasible()
            && match &self.best {
                None => true,
                Some((_, best_f)) => member.f < *best_f,
            };
        if improves {
            self.best = Some((member.x.clone(), member.f));
        }
        self.population.push(member);
    }

    /// Counts the new infill's feasibility and halves/doubles the margin when
    /// a counter reaches its threshold (both counters reset on either event).
    pub fn update_epsilon(&mut self, new_point_feasible: bool, params: &CobraParams) {
        if new_point_feasible {
            self.c_feas += 1;
        } else {
            self.c_infeas += 1;
        }
        if self.c_feas >= params.t_feas {
            self.eps /= 2.0;
            self.c_feas = 0;
            self.c_infeas = 0;
        } else if self.c_infeas >= params.t_infeas {
            self.eps = (2.0 * self.eps).min(params.eps_max);
            self.c_feas = 0;
            self.c_infeas = 0;
        }
    }
}

/// Distance requirement for the given iteration: the cycle restarts from its
/// first element after the last one.
pub fn select_rho(params: &CobraParams, iteration: usize) -> f64 {
    params.drc[iteration % params.drc.len()]
}

/// Latin hypercube sample of `n` points: each coordinate gets one uniformly
/// jittered value per stratum, with independently shuffled stratum order.
pub fn init_design(
    lower: &[f64],
    upper: &[f64],
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Vec<Vec<f64>> {
    let d = lower.len();
    let mut design = vec![vec![0.0; d]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..d {
        use rand::seq::SliceRandom;
        strata.shuffle(rng);
        for (i, &s) in strata.iter().enumerate() {
            let u: f64 = rng.random();
            design[i][j] = lower[j] + (upper[j] - lower[j]) * (s as f64 + u) / n as f64;
        }
    }
    design
}

/// Per-evaluation history row of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecordRow {
    /// 1-based true-evaluation index.
    pub eval_index: usize,
    /// Best feasible objective so far, if any feasible point was seen.
    pub best_f: Option<f64>,
    /// Whether the point evaluated at this index was feasible.
    pub feasible: bool,
    /// Whether the objective surrogate was fitted to plog-transformed values.
    pub plog_active: bool,
    /// Whether this infill started the subsolver from a random point.
    pub restart: bool,
    /// Constraint margin in force when this point was produced.
    #[serde(default)]
    pub eps: f64,
}

/// Trace of the self-adjusting elements, embedded in the run record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentTrace {
    pub fr_hat: Option<f64>,
    pub gr_hat: Vec<f64>,
    pub constraint_scales: Vec<f64>,
    pub drc_choice: Option<String>,
    /// `(eval_count, q)` after each plog-effect analysis.
    pub q_history: Vec<(usize, f64)>,
    pub final_q: Option<f64>,
}

/// Complete, serializable history of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub dim: usize,
    pub seed: u64,
    pub params: CobraParams,
    pub optimum: Option<f64>,
    pub rows: Vec<RunRecordRow>,
    /// Best feasible point found, in the coordinates of the problem that was
    /// run (callers that rescaled map it back).
    pub best_x: Option<Vec<f64>>,
    pub best_f: Option<f64>,
    pub adjustment: Option<AdjustmentTrace>,
}

impl RunRecord {
    pub fn final_error(&self) -> Option<f64> {
        Some(self.best_f? - self.optimum?)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "eval_index,best_f,error_vs_optimum,feasible,plog_active,restart")?;
        for row in &self.rows {
            let best = row.best_f.map(|v| v.to_string()).unwrap_or_default();
            let err = match (row.best_f, self.optimum) {
                (Some(b), Some(o)) => (b - o).to_string(),
                _ => String::new(),
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                row.eval_index, best, err, row.feasible, row.plog_active, row.restart
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("record serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidConfig(format!("bad run record: {e}")))
    }
}

/// Iteration context handed to the adaptive hooks: the factorization over the
/// current population and its raw objective values (cheap refits for the
/// plog-effect analysis reuse the factorization).
pub struct IterationContext<'a> {
    pub factorization: &'a RbfFactorization,
    pub raw_f: &'a [f64],
    pub eval_count: usize,
}

/// Start point decision for one iteration.
pub enum StartChoice {
    /// Default policy: current best, or the least-violating member.
    Default,
    /// Explicit start point; `restart` marks a random restart.
    Point { x: Vec<f64>, restart: bool },
}

/// Self-adjusting extensions layered on the plain loop. The default
/// implementations are no-ops, giving the fixed-parameter base algorithm.
pub trait AdaptiveHooks {
    /// Called once after the initial design is evaluated; may retune the
    /// distance cycle and record constraint scales.
    fn after_init(&mut self, _state: &CobraState, _params: &mut CobraParams, _rng: &mut ChaCha12Rng) {}

    /// Positive factors applied to constraint values before fitting.
    fn constraint_scales(&self) -> Option<&[f64]> {
        None
    }

    /// Whether the objective surrogate is fitted to plog-transformed values.
    fn plog_active(&self) -> bool {
        false
    }

    /// Picks the subsolver start point for this iteration.
    fn choose_start(&mut self, _state: &CobraState, _rng: &mut ChaCha12Rng) -> StartChoice {
        StartChoice::Default
    }

    /// Called after each true evaluation, before the new point joins the
    /// population; periodic plog-effect analysis lives here.
    fn after_evaluation(&mut self, _ctx: &IterationContext<'_>, _x_new: &[f64], _f_new: f64) {}

    /// Adjustment trace for the run record.
    fn trace(&self) -> Option<AdjustmentTrace> {
        None
    }
}

/// Repair hook applied to the subsolver solution before true evaluation.
/// The identity is the default (no repair algorithm in this crate).
pub type RepairHook<'a> = &'a dyn Fn(&[f64], &CobraState) -> Vec<f64>;

struct NoHooks;
impl AdaptiveHooks for NoHooks {}

/// Builds the constrained surrogate subproblem for one iteration: the
/// objective surrogate, one margin-tightened constraint surrogate per true
/// constraint, and one distance constraint per population member (skipped
/// when `rho` is zero, where they hold everywhere).
#[allow(clippy::too_many_arguments)]
pub fn assemble_subproblem<'a>(
    models: &'a [SurrogateModel],
    factorization: &'a RbfFactorization,
    state: &'a CobraState,
    lower: &[f64],
    upper: &[f64],
    rho: f64,
    eps: f64,
    x_start: Vec<f64>,
    params: &CobraParams,
) -> SubproblemSpec<'a> {
    use std::cell::RefCell;
    use std::rc::Rc;

    let d = lower.len();
    // one kernel-basis computation per point, shared by all surrogate models
    let cache: Rc<RefCell<(Vec<f64>, Vec<f64>)>> =
        Rc::new(RefCell::new((Vec::new(), Vec::new())));

    let cache_obj = cache.clone();
    let objective_model = &models[0];
    let objective: Box<dyn Fn(&[f64]) -> f64 + 'a> = Box::new(move |x: &[f64]| {
        let mut c = cache_obj.borrow_mut();
        let (key, basis) = &mut *c;
        if key.as_slice() != x {
            key.clear();
            key.extend_from_slice(x);
            factorization.basis_into(x, basis);
        }
        objective_model.predict_with_basis(x, basis)
    });

    let mut constraints: Vec<Box<dyn Fn(&[f64]) -> f64 + 'a>> = Vec::new();
    for model in &models[1..] {
        let cache_i = cache.clone();
        constraints.push(Box::new(move |x: &[f64]| {
            let mut c = cache_i.borrow_mut();
            let (key, basis) = &mut *c;
            if key.as_slice() != x {
                key.clear();
                key.extend_from_slice(x);
                factorization.basis_into(x, basis);
            }
            model.predict_with_basis(x, basis) + eps
        }));
    }
    if rho > 0.0 {
        for member in &state.population {
            let xj = &member.x;
            constraints.push(Box::new(move |x: &[f64]| {
                let dist: f64 = x
                    .iter()
                    .zip(xj)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                rho - dist
            }));
        }
    }

    SubproblemSpec {
        objective,
        inequality_constraints: constraints,
        lower: lower.to_vec(),
        upper: upper.to_vec(),
        start: x_start,
        max_inner_evals: params.inner_evals_per_dim * d,
        convergence_tol: params.inner_tol,
    }
}

/// Runs plain COBRA (or SACOBRA when `hooks` are supplied) on `problem`,
/// spending exactly `params.budget` true evaluations.
pub fn run_cobra(
    problem: &Problem,
    params: &CobraParams,
    seed: u64,
    hooks: Option<&mut dyn AdaptiveHooks>,
) -> Result<RunRecord> {
    let d = problem.dim();
    params.validate(d)?;
    let mut params = params.clone();
    let mut no_hooks = NoHooks;
    let hooks: &mut dyn AdaptiveHooks = match hooks {
        Some(h) => h,
        None => &mut no_hooks,
    };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut state = CobraState::new(params.eps_init);
    let mut rows: Vec<RunRecordRow> = Vec::with_capacity(params.budget);

    // initial design: one true evaluation per design point
    let design = init_design(problem.lower(), problem.upper(), params.n_init, &mut rng);
    for x in design {
        let (f, g) = problem.evaluate(&x)?;
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEvaluation { x, evals: state.population.len() });
        }
        state.update_best(x, f, g);
        rows.push(RunRecordRow {
            eval_index: state.population.len(),
            best_f: state.best.as_ref().map(|(_, f)| *f),
            feasible: state.population.last().unwrap().is_feasible(),
            plog_active: false,
            restart: false,
            eps: state.eps,
        });
    }

    hooks.after_init(&state, &mut params, &mut rng);

    while state.population.len() < params.budget {
        let n = state.population.len();
        let plog_active = hooks.plog_active();

        // fit objective and constraint surrogates over the population,
        // sharing one factorization of the augmented system
        let points: Vec<Vec<f64>> = state.population.iter().map(|m| m.x.clone()).collect();
        let factorization = RbfFactorization::new(&points, params.kernel, params.tail)?;
        let raw_f: Vec<f64> = state.population.iter().map(|m| m.f).collect();
        let fit_f: Vec<f64> = if plog_active {
            // anchor the transform at the incumbent so the model keeps full
            // resolution where the search happens (population minimum before
            // any feasible point exists)
            let shift = if params.plog_shift_to_min {
                match &state.best {
                    Some((_, f)) => *f,
                    None => raw_f.iter().cloned().fold(f64::INFINITY, f64::min),
                }
            } else {
                0.0
            };
            raw_f.iter().map(|&v| crate::surrogate::plog(v - shift)).collect()
        } else {
            raw_f.clone()
        };
        let mut models = Vec::with_capacity(1 + problem.constraint_count());
        models.push(factorization.fit(&fit_f)?);
        let scales = hooks.constraint_scales().map(<[f64]>::to_vec);
        for ci in 0..problem.constraint_count() {
            let scale = scales.as_ref().map_or(1.0, |s| s[ci]);
            let values: Vec<f64> =
                state.population.iter().map(|m| m.g[ci] * scale).collect();
            models.push(factorization.fit(&values)?);
        }

        let rho = select_rho(&params, state.iteration);
        let eps_used = state.eps;
        let (x_start, restart) = match hooks.choose_start(&state, &mut rng) {
            StartChoice::Point { x, restart } => (x, restart),
            StartChoice::Default => match &state.best {
                Some((x, _)) => (x.clone(), false),
                None => (state.least_violating().x.clone(), false),
            },
        };

        let spec = assemble_subproblem(
            &models,
            &factorization,
            &state,
            problem.lower(),
            problem.upper(),
            rho,
            state.eps,
            x_start,
            &params,
        );
        let result = subsolver::minimize(&spec)?;
        drop(spec);
        let mut x_new = result.x;

        // protect the next fit against duplicate centers (possible when rho=0)
        let mut guard = 0;
        while nearest_distance(&state.population, &x_new) <= crate::surrogate::DUPLICATE_TOLERANCE
            && guard < 10
        {
            for j in 0..d {
                let jitter = (rng.random::<f64>() * 2.0 - 1.0) * 1e-8;
                x_new[j] = (x_new[j] + jitter).clamp(problem.lower()[j], problem.upper()[j]);
            }
            guard += 1;
        }

        let (f_new, g_new) = problem.evaluate(&x_new)?;
        if !f_new.is_finite() || g_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEvaluation { x: x_new, evals: n });
        }

        hooks.after_evaluation(
            &IterationContext { factorization: &factorization, raw_f: &raw_f, eval_count: n },
            &x_new,
            f_new,
        );

        // repair hook point: identity (see RepairHook)

        let feasible = g_new.iter().all(|&v| v <= 0.0);
        state.update_epsilon(feasible, &params);
        state.update_best(x_new, f_new, g_new);
        state.iteration += 1;
        rows.push(RunRecordRow {
            eval_index: state.population.len(),
            best_f: state.best.as_ref().map(|(_, f)| *f),
            feasible,
            plog_active,
            restart,
            eps: eps_used,
        });
    }

    Ok(RunRecord {
        problem: problem.name().to_string(),
        dim: d,
        seed,
        params,
        optimum: problem.optimum_value(),
        rows,
        best_x: state.best.as_ref().map(|(x, _)| x.clone()),
        best_f: state.best.as_ref().map(|(_, f)| *f),
        adjustment: hooks.trace(),
    })
}

fn nearest_distance(population: &[Member], x: &[f64]) -> f64 {
    population
        .iter()
        .map(|m| {
            m.x.iter()
                .zip(x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}
