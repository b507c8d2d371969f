//! The SACOBRA self-adjusting elements: input rescaling, constraint-range
//! normalization (aCF), adaptive distance-requirement cycle (aDRC), random
//! starts (RS), and the online plog fitness adjustment (aFF).
//!
//! All adjustment state belongs to one run. The elements plug into the base
//! loop through [`AdaptiveHooks`]; each can be switched off independently,
//! which yields the ablation variants used in benchmarking.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::cobra::{
    run_cobra, AdaptiveHooks, AdjustmentTrace, CobraParams, CobraState, IterationContext,
    RunRecord, StartChoice, DRC_LARGE, DRC_SMALL,
};
use crate::error::{Error, Result};
use crate::problems::{Evaluator, Problem};
use crate::surrogate::{plog, plog_inverse, KernelKind, RbfFactorization, TailKind};

/// Objective-range threshold above which the small distance cycle is used.
pub const FR_THRESHOLD: f64 = 1000.0;

/// Element-wise affine map between coordinate spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: Vec<f64>,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.scale.iter().zip(&self.offset))
            .map(|(v, (s, o))| v * s + o)
            .collect()
    }
}

/// Rescales a problem element-wise to the `[-1, 1]` box. Returns the scaled
/// problem together with the maps in both directions
/// (`to_original(to_scaled(x)) = x`).
pub fn rescale_problem(problem: &Problem) -> Result<(Problem, AffineMap, AffineMap)> {
    let d = problem.dim();
    let mut to_original = AffineMap { scale: vec![0.0; d], offset: vec![0.0; d] };
    let mut to_scaled = AffineMap { scale: vec![0.0; d], offset: vec![0.0; d] };
    for i in 0..d {
        let (a, b) = (problem.lower()[i], problem.upper()[i]);
        if !(b - a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "cannot rescale degenerate bound [{a}, {b}] in dimension {i}"
            )));
        }
        let half = (b - a) / 2.0;
        let mid = (a + b) / 2.0;
        to_original.scale[i] = half;
        to_original.offset[i] = mid;
        to_scaled.scale[i] = 1.0 / half;
        to_scaled.offset[i] = -mid / half;
    }
    let map = to_original.clone();
    let scaled = problem.composed_with(
        problem.name().to_string(),
        vec![-1.0; d],
        vec![1.0; d],
        std::sync::Arc::new(move |z: &[f64]| map.apply(z)),
        problem.optimum_point().map(|x| to_scaled.apply(x)),
    )?;
    Ok((scaled, to_original, to_scaled))
}

/// Which distance-requirement cycle the initial analysis selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DrcChoice {
    Small,
    Large,
}

/// Ranges extracted from the initial population and the derived constraint
/// normalization factors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustmentInfo {
    /// Objective range over the initial population.
    pub fr_hat: f64,
    /// Per-constraint value range over the initial population.
    pub gr_hat: Vec<f64>,
    /// `avg(gr_hat) / gr_hat[i]`, forced to 1 for constant constraints.
    pub constraint_scale: Vec<f64>,
    pub drc_choice: DrcChoice,
    /// True when some constraint had zero range over the initial population.
    pub degenerate_constraint: bool,
}

/// Computes objective/constraint ranges over the initial population and the
/// constraint scales; selects the small cycle for steep objectives.
pub fn analyse_initial_population(f_values: &[f64], g_values: &[Vec<f64>]) -> AdjustmentInfo {
    let fr_hat = range(f_values);
    let gr_hat: Vec<f64> = g_values.iter().map(|g| range(g)).collect();
    let m = gr_hat.len();
    let mut degenerate = false;
    let constraint_scale = if m == 0 {
        Vec::new()
    } else {
        let avg: f64 = gr_hat.iter().sum::<f64>() / m as f64;
        gr_hat
            .iter()
            .map(|&r| {
                if r > 0.0 {
                    avg / r
                } else {
                    degenerate = true;
                    1.0
                }
            })
            .collect()
    };
    AdjustmentInfo {
        fr_hat,
        gr_hat,
        constraint_scale,
        drc_choice: if fr_hat > FR_THRESHOLD { DrcChoice::Small } else { DrcChoice::Large },
        degenerate_constraint: degenerate,
    }
}

fn range(values: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    max - min
}

/// Wraps constraint evaluators with the positive normalization factors of
/// `info`. Scales never change the sign of a constraint value, so the true
/// feasible region is untouched.
pub fn adjust_constraints(constraints: &[Evaluator], info: &AdjustmentInfo) -> Vec<Evaluator> {
    constraints
        .iter()
        .zip(&info.constraint_scale)
        .map(|(c, &s)| {
            let c = c.clone();
            let e: Evaluator = std::sync::Arc::new(move |x: &[f64]| c(x) * s);
            e
        })
        .collect()
}

/// Restart probabilities of the random-start element.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RestartParams {
    /// Restart probability while feasible points are plentiful.
    pub p1: f64,
    /// Elevated probability when the feasible fraction drops below the cut.
    pub p2: f64,
    pub low_feasibility_cut: f64,
}

impl Default for RestartParams {
    fn default() -> Self {
        Self { p1: 0.125, p2: 0.4, low_feasibility_cut: 0.05 }
    }
}

/// Chooses the subsolver start point: the incumbent best, or (with the
/// feasibility-dependent restart probability) a uniform random point in the
/// box. With no feasible incumbent the start is always random.
///
/// Draw order from `rng` is fixed: one branch uniform when a best exists,
/// then `d` coordinate uniforms when restarting.
pub fn random_start(
    x_best: Option<&[f64]>,
    feasible_fraction: f64,
    lower: &[f64],
    upper: &[f64],
    restart: &RestartParams,
    rng: &mut ChaCha12Rng,
) -> (Vec<f64>, bool) {
    let uniform_point = |rng: &mut ChaCha12Rng| {
        lower
            .iter()
            .zip(upper)
            .map(|(&a, &b)| a + (b - a) * rng.random::<f64>())
            .collect::<Vec<f64>>()
    };
    let Some(best) = x_best else {
        return (uniform_point(rng), true);
    };
    let p = if feasible_fraction < restart.low_feasibility_cut { restart.p2 } else { restart.p1 };
    if rng.random::<f64>() < p {
        (uniform_point(rng), true)
    } else {
        (best.to_vec(), false)
    }
}

/// State of the online plog decision: the growing set `E` of approximation
/// error ratios and the `q = log10(median(E))` statistic that switches the
/// transform on (`q > threshold`) or off.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlogDecision {
    pub error_ratios: Vec<f64>,
    pub q: f64,
    pub active: bool,
    pub check_period: usize,
    pub q_threshold: f64,
    /// True when a ratio had to be clamped (denominator underflow).
    pub clamped: bool,
}

impl Default for PlogDecision {
    fn default() -> Self {
        Self {
            error_ratios: Vec::new(),
            q: f64::NAN,
            active: false,
            check_period: 10,
            q_threshold: 1.0,
            clamped: false,
        }
    }
}

impl PlogDecision {
    fn push_ratio(&mut self, ratio: f64) {
        self.error_ratios.push(ratio);
        self.q = median(&self.error_ratios).log10();
        self.active = self.q > self.q_threshold;
    }
}

/// Midpoint median of an unsorted slice (non-empty).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

const RATIO_FLOOR: f64 = 1e-300;
const RATIO_CLAMP: f64 = 1e300;

/// One plog-effect analysis step: fits surrogates to the raw and
/// plog-transformed objective values over the population, predicts both at
/// the held-out `x_new` (not in the population), and appends the error ratio
/// to the decision state.
pub fn analyse_plog_effect(
    points: &[Vec<f64>],
    raw_f: &[f64],
    x_new: &[f64],
    f_new: f64,
    decision: &mut PlogDecision,
    kernel: KernelKind,
    tail: TailKind,
) -> Result<()> {
    let factorization = RbfFactorization::new(points, kernel, tail)?;
    analyse_plog_effect_with_factorization(&factorization, raw_f, x_new, f_new, decision)
}

/// Same analysis against an existing factorization over the population.
pub fn analyse_plog_effect_with_factorization(
    factorization: &RbfFactorization,
    raw_f: &[f64],
    x_new: &[f64],
    f_new: f64,
    decision: &mut PlogDecision,
) -> Result<()> {
    let plog_f: Vec<f64> = raw_f.iter().map(|&v| plog(v)).collect();
    let raw_model = factorization.fit(raw_f)?;
    let plog_model = factorization.fit(&plog_f)?;
    let raw_err = (raw_model.predict(x_new)? - f_new).abs();
    let plog_err = (plog_inverse(plog_model.predict(x_new)?) - f_new).abs();
    let ratio = if raw_err < RATIO_FLOOR && plog_err < RATIO_FLOOR {
        1.0
    } else if plog_err < RATIO_FLOOR {
        decision.clamped = true;
        RATIO_CLAMP
    } else {
        raw_err / plog_err
    };
    decision.push_ratio(ratio);
    Ok(())
}

/// Wraps an objective evaluator with the transform the decision mandates:
/// `plog . f` while active, `f` itself otherwise. Surrogates are fitted to
/// this effective objective; best-solution bookkeeping always uses raw `f`.
pub fn effective_objective(f: Evaluator, decision: &PlogDecision) -> Evaluator {
    if decision.active {
        std::sync::Arc::new(move |x: &[f64]| plog(f(x)))
    } else {
        f
    }
}

/// How the online fitness transform is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlogMode {
    /// Decided online from the error-ratio statistic (the aFF element).
    Adaptive,
    /// Transform never applied (aFF switched off).
    Never,
    /// Transform always applied (used by the impact-ratio experiments).
    Always,
}

/// Which self-adjusting elements are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SacobraOptions {
    pub rescale: bool,
    pub acf: bool,
    pub adrc: bool,
    pub random_start: bool,
    pub plog: PlogMode,
}

impl Default for SacobraOptions {
    fn default() -> Self {
        Self {
            rescale: true,
            acf: true,
            adrc: true,
            random_start: true,
            plog: PlogMode::Adaptive,
        }
    }
}

impl SacobraOptions {
    /// The fixed-parameter base algorithm: every element off.
    pub fn all_off() -> Self {
        Self {
            rescale: false,
            acf: false,
            adrc: false,
            random_start: false,
            plog: PlogMode::Never,
        }
    }
}

/// Adaptive-hook implementation wiring the SACOBRA elements into the loop.
pub struct SacobraHooks {
    options: SacobraOptions,
    restart: RestartParams,
    lower: Vec<f64>,
    upper: Vec<f64>,
    info: Option<AdjustmentInfo>,
    decision: PlogDecision,
    q_history: Vec<(usize, f64)>,
    drc_choice: Option<DrcChoice>,
}

impl SacobraHooks {
    pub fn new(problem: &Problem, options: SacobraOptions) -> Self {
        let mut decision = PlogDecision::default();
        if options.plog == PlogMode::Always {
            decision.active = true;
        }
        Self {
            options,
            restart: RestartParams::default(),
            lower: problem.lower().to_vec(),
            upper: problem.upper().to_vec(),
            info: None,
            decision,
            q_history: Vec::new(),
            drc_choice: None,
        }
    }

    pub fn decision(&self) -> &PlogDecision {
        &self.decision
    }
}

impl AdaptiveHooks for SacobraHooks {
    fn after_init(&mut self, state: &CobraState, params: &mut CobraParams, _rng: &mut ChaCha12Rng) {
        let f_values: Vec<f64> = state.population.iter().map(|m| m.f).collect();
        let m = state.population.first().map_or(0, |mem| mem.g.len());
        let g_values: Vec<Vec<f64>> = (0..m)
            .map(|ci| state.population.iter().map(|mem| mem.g[ci]).collect())
            .collect();
        let info = analyse_initial_population(&f_values, &g_values);

        if self.options.adrc {
            params.drc = match info.drc_choice {
                DrcChoice::Small => DRC_SMALL.to_vec(),
                DrcChoice::Large => DRC_LARGE.to_vec(),
            };
            self.drc_choice = Some(info.drc_choice);
        }

        if self.options.plog == PlogMode::Adaptive {
            // initial analysis holds out the best point of the initial design
            let held_out = f_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i)
                .expect("population non-empty");
            let mut points = Vec::with_capacity(state.population.len() - 1);
            let mut values = Vec::with_capacity(state.population.len() - 1);
            for (i, member) in state.population.iter().enumerate() {
                if i != held_out {
                    points.push(member.x.clone());
                    values.push(member.f);
                }
            }
            let x_new = &state.population[held_out].x;
            let f_new = state.population[held_out].f;
            if analyse_plog_effect(
                &points,
                &values,
                x_new,
                f_new,
                &mut self.decision,
                params.kernel,
                params.tail,
            )
            .is_ok()
            {
                self.q_history.push((state.population.len(), self.decision.q));
            }
        }

        self.info = Some(info);
    }

    fn constraint_scales(&self) -> Option<&[f64]> {
        if self.options.acf {
            self.info.as_ref().map(|i| i.constraint_scale.as_slice())
        } else {
            None
        }
    }

    fn plog_active(&self) -> bool {
        self.decision.active
    }

    fn choose_start(&mut self, state: &CobraState, rng: &mut ChaCha12Rng) -> StartChoice {
        if !self.options.random_start {
            return StartChoice::Default;
        }
        let best = state.best.as_ref().map(|(x, _)| x.as_slice());
        let (x, restart) = random_start(
            best,
            state.feasible_fraction(),
            &self.lower,
            &self.upper,
            &self.restart,
            rng,
        );
        StartChoice::Point { x, restart }
    }

    fn after_evaluation(&mut self, ctx: &IterationContext<'_>, x_new: &[f64], f_new: f64) {
        if self.options.plog != PlogMode::Adaptive {
            return;
        }
        if ctx.eval_count % self.decision.check_period != 0 {
            return;
        }
        if analyse_plog_effect_with_factorization(
            ctx.factorization,
            ctx.raw_f,
            x_new,
            f_new,
            &mut self.decision,
        )
        .is_ok()
        {
            self.q_history.push((ctx.eval_count, self.decision.q));
        }
    }

    fn trace(&self) -> Option<AdjustmentTrace> {
        Some(AdjustmentTrace {
            fr_hat: self.info.as_ref().map(|i| i.fr_hat),
            gr_hat: self.info.as_ref().map(|i| i.gr_hat.clone()).unwrap_or_default(),
            constraint_scales: self
                .info
                .as_ref()
                .map(|i| i.constraint_scale.clone())
                .unwrap_or_default(),
            drc_choice: self.drc_choice.map(|c| format!("{c:?}")),
            q_history: self.q_history.clone(),
            final_q: if self.decision.error_ratios.is_empty() { None } else { Some(self.decision.q) },
        })
    }
}

/// Runs SACOBRA (or any ablation of it) on `problem`: rescales when enabled,
/// wires the remaining elements into the loop, and maps the best point back
/// to original coordinates.
pub fn run_sacobra(
    problem: &Problem,
    params: &CobraParams,
    options: &SacobraOptions,
    seed: u64,
) -> Result<RunRecord> {
    if options.rescale {
        let (scaled, to_original, _) = rescale_problem(problem)?;
        let mut hooks = SacobraHooks::new(&scaled, *options);
        let mut record = run_cobra(&scaled, params, seed, Some(&mut hooks))?;
        record.best_x = record.best_x.map(|x| to_original.apply(&x));
        Ok(record)
    } else {
        let mut hooks = SacobraHooks::new(problem, *options);
        run_cobra(problem, params, seed, Some(&mut hooks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::g_suite;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn rescale_maps_published_bound_examples() {
        let suite = g_suite();
        let g10 = &suite[9]; // x1 in [100, 10000]
        let (_, to_original, to_scaled) = rescale_problem(g10).unwrap();
        let probe = |x1: f64| to_scaled.apply(&[x1, 1000.0, 1000.0, 10.0, 10.0, 10.0, 10.0, 10.0])[0];
        assert!((probe(100.0) + 1.0).abs() < 1e-12);
        assert!((probe(10000.0) - 1.0).abs() < 1e-12);
        assert!(probe(5050.0).abs() < 1e-12);
        let back = to_original.apply(&to_scaled.apply(&[123.4, 2000.0, 3000.0, 20.0, 30.0, 40.0, 50.0, 60.0]));
        assert!((back[0] - 123.4).abs() < 1e-12);
    }

    #[test]
    fn rescaled_problem_evaluates_identically() {
        let suite = g_suite();
        let g06 = &suite[5];
        let (scaled, to_original, to_scaled) = rescale_problem(g06).unwrap();
        let x = vec![40.0, 70.0];
        let z = to_scaled.apply(&x);
        let (f_orig, g_orig) = g06.evaluate(&x).unwrap();
        let (f_scaled, g_scaled) = scaled.evaluate(&z).unwrap();
        assert_eq!(f_orig, f_scaled);
        assert_eq!(g_orig, g_scaled);
        let x_back = to_original.apply(&z);
        for (a, b) in x.iter().zip(&x_back) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn initial_population_analysis_examples() {
        // objective range picks the cycle: 298.14 stays on the large cycle
        let info = analyse_initial_population(&[0.0, 298.14], &[]);
        assert_eq!(info.fr_hat, 298.14);
        assert_eq!(info.drc_choice, DrcChoice::Large);
        let info = analyse_initial_population(&[0.0, 5000.0], &[]);
        assert_eq!(info.drc_choice, DrcChoice::Small);

        // constraint ranges (1, 1000): avg 500.5, scales (500.5, 0.5005)
        let g = vec![vec![0.0, 1.0], vec![0.0, 1000.0]];
        let info = analyse_initial_population(&[0.0, 1.0], &g);
        assert!((info.constraint_scale[0] - 500.5).abs() < 1e-12);
        assert!((info.constraint_scale[1] - 0.5005).abs() < 1e-12);

        // equal ranges give identity scales
        let g = vec![vec![0.0, 2.0], vec![5.0, 7.0]];
        let info = analyse_initial_population(&[0.0, 1.0], &g);
        assert_eq!(info.constraint_scale, vec![1.0, 1.0]);

        // zero-range constraint forced to scale 1 with the warning flag
        let g = vec![vec![3.0, 3.0], vec![0.0, 10.0]];
        let info = analyse_initial_population(&[0.0, 1.0], &g);
        assert_eq!(info.constraint_scale[0], 1.0);
        assert!(info.degenerate_constraint);
    }

    #[test]
    fn restart_probability_branches() {
        let rp = RestartParams::default();
        let lower = [-1.0, -1.0];
        let upper = [1.0, 1.0];
        let best = [0.25, -0.5];
        let count_restarts = |feas_frac: f64, n: usize| {
            let mut rng = ChaCha12Rng::seed_from_u64(77);
            (0..n)
                .filter(|_| {
                    random_start(Some(&best), feas_frac, &lower, &upper, &rp, &mut rng).1
                })
                .count()
        };
        // binomial 99% interval around p1 = 0.125 at 1e5 draws
        let n = 100_000;
        let hits = count_restarts(0.5, n);
        let rate = hits as f64 / n as f64;
        assert!((0.118..=0.132).contains(&rate), "restart rate {rate}");
        // elevated probability p2 = 0.4 when fewer than 5% feasible
        let hits = count_restarts(0.01, n);
        let rate = hits as f64 / n as f64;
        let sd = (0.4 * 0.6 / n as f64).sqrt();
        assert!((rate - 0.4).abs() <= 3.0 * sd, "low-feasibility rate {rate}");
        // no best yet: always random
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (x, restarted) = random_start(None, 1.0, &lower, &upper, &rp, &mut rng);
        assert!(restarted);
        assert!(x.iter().zip(&lower).all(|(v, l)| v >= l));
    }

    #[test]
    fn plog_decision_threshold_is_strict() {
        let mut d = PlogDecision::default();
        for _ in 0..5 {
            d.push_ratio(10.0);
        }
        assert!((d.q - 1.0).abs() < 1e-12);
        assert!(!d.active, "q = 1 must not activate (strict >)");
        let mut d = PlogDecision::default();
        for _ in 0..5 {
            d.push_ratio(100.0);
        }
        assert!((d.q - 2.0).abs() < 1e-12);
        assert!(d.active);
    }

    #[test]
    fn q_matches_independent_median() {
        let ratios = [3.0, 0.1, 7.0, 2.5, 90.0, 0.4];
        let mut d = PlogDecision::default();
        for r in ratios {
            d.push_ratio(r);
        }
        let mut sorted = ratios.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = 0.5 * (sorted[2] + sorted[3]);
        assert!((d.q - med.log10()).abs() <= 1e-12);
    }

    #[test]
    fn effective_objective_wraps_and_reverts() {
        let f: Evaluator = std::sync::Arc::new(|x: &[f64]| x[0]);
        let mut decision = PlogDecision::default();
        let id = effective_objective(f.clone(), &decision);
        assert_eq!(id(&[3.0]), 3.0);
        decision.active = true;
        let wrapped = effective_objective(f.clone(), &decision);
        assert_eq!(wrapped(&[0.0]), 0.0); // plog(0) = 0
        assert!((wrapped(&[std::f64::consts::E - 1.0]) - 1.0).abs() < 1e-12);
        // decision flip mid-run: rewrapping reverts to the identity
        decision.active = false;
        let reverted = effective_objective(f, &decision);
        assert_eq!(reverted(&[5.0]), 5.0);
    }

    #[test]
    fn analysis_runs_on_exact_fits() {
        let mut d = PlogDecision::default();
        // affine data: both fits are near-exact, ratio guard keeps it finite
        let points = vec![vec![-1.0], vec![-0.5], vec![0.0], vec![0.5], vec![1.0]];
        let values: Vec<f64> = points.iter().map(|p| 2.0 * p[0]).collect();
        analyse_plog_effect(
            &points,
            &values,
            &[0.25],
            0.5,
            &mut d,
            KernelKind::Cubic,
            TailKind::Linear,
        )
        .unwrap();
        assert_eq!(d.error_ratios.len(), 1);
        assert!(d.error_ratios[0].is_finite());
    }

    #[test]
    fn sacobra_runs_and_traces() {
        let suite = g_suite();
        let g06 = &suite[5];
        let mut params = CobraParams::defaults_for_dim(g06.dim());
        params.budget = 25;
        let record = run_sacobra(g06, &params, &SacobraOptions::default(), 3).unwrap();
        assert_eq!(record.rows.len(), 25);
        let trace = record.adjustment.as_ref().unwrap();
        assert!(trace.fr_hat.is_some());
        assert_eq!(trace.gr_hat.len(), 2);
        assert!(!trace.q_history.is_empty(), "initial plog analysis recorded");
        // best point is reported in original coordinates
        if let Some(x) = &record.best_x {
            assert!(x[0] >= 13.0 - 1e-9 && x[0] <= 100.0 + 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rescale_round_trip(seed in 0u64..500) {
            let suite = g_suite();
            let g04 = &suite[3];
            let (_, to_original, to_scaled) = rescale_problem(g04).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let x: Vec<f64> = g04
                .lower()
                .iter()
                .zip(g04.upper())
                .map(|(&a, &b)| a + (b - a) * rng.random::<f64>())
                .collect();
            let back = to_original.apply(&to_scaled.apply(&x));
            for (a, b) in x.iter().zip(&back) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn scaling_preserves_feasibility(seed in 0u64..500) {
            let suite = g_suite();
            let g05 = &suite[4];
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            // analysis from a random "initial population"
            let sample: Vec<Vec<f64>> = (0..12)
                .map(|_| {
                    g05.lower()
                        .iter()
                        .zip(g05.upper())
                        .map(|(&a, &b)| a + (b - a) * rng.random::<f64>())
                        .collect()
                })
                .collect();
            let evals: Vec<(f64, Vec<f64>)> =
                sample.iter().map(|x| g05.evaluate(x).unwrap()).collect();
            let g_values: Vec<Vec<f64>> = (0..g05.constraint_count())
                .map(|ci| evals.iter().map(|(_, g)| g[ci]).collect())
                .collect();
            let f_values: Vec<f64> = evals.iter().map(|(f, _)| *f).collect();
            let info = analyse_initial_population(&f_values, &g_values);
            for (_, g) in &evals {
                let feasible_raw = g.iter().all(|&v| v <= 0.0);
                let feasible_scaled = g
                    .iter()
                    .zip(&info.constraint_scale)
                    .all(|(&v, &s)| v * s <= 0.0);
                prop_assert_eq!(feasible_raw, feasible_scaled);
            }
        }
    }
}
