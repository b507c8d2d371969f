//! Derivative-free constrained local solver for the surrogate subproblem.
//!
//! Each COBRA iteration minimizes the objective surrogate subject to the
//! constraint surrogates (with the epsilon margin) and the distance
//! constraints, all of which are cheap. The solver is Powell's COBYLA scheme:
//! linear models of objective and constraints interpolated on a d+1 point
//! simplex, a linearized trust-region step, and a shrinking trust radius. The
//! implementation is backed by the `cobyla` crate; this module owns the
//! subproblem contract, instruments every evaluation, and returns the best
//! evaluated point under a feasibility-first merit order (COBYLA iterates may
//! be infeasible, and its own return value is not always the merit-best
//! evaluated point).

use std::cell::RefCell;
use std::cmp::Ordering;
use std::rc::Rc;

use cobyla::{Func, RhoBeg, StopTols};

use crate::error::{Error, Result};

/// Feasibility tolerance of the merit order.
pub const MERIT_FEASIBILITY_TOL: f64 = 1e-9;

/// Fraction of each box side used as the initial trust radius (0.1 on a
/// rescaled `[-1, 1]` box).
pub const TRUST_RADIUS_FRACTION: f64 = 0.25;

/// A constrained subproblem over cheap evaluators.
///
/// Constraints use the `<= 0` convention and already include any margin or
/// distance terms. `start` must lie inside the box; it is used as-is even if
/// infeasible for the constraints.
pub struct SubproblemSpec<'a> {
    pub objective: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    pub inequality_constraints: Vec<Box<dyn Fn(&[f64]) -> f64 + 'a>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub start: Vec<f64>,
    pub max_inner_evals: usize,
    pub convergence_tol: f64,
}

impl<'a> SubproblemSpec<'a> {
    fn validate(&self) -> Result<()> {
        let d = self.lower.len();
        if self.upper.len() != d || self.start.len() != d || d == 0 {
            return Err(Error::InvalidSubproblem("inconsistent dimensions".into()));
        }
        for i in 0..d {
            if self.start[i] < self.lower[i] - 1e-12 || self.start[i] > self.upper[i] + 1e-12 {
                return Err(Error::InvalidSubproblem(format!(
                    "start[{i}] = {} outside [{}, {}]",
                    self.start[i], self.lower[i], self.upper[i]
                )));
            }
        }
        if self.max_inner_evals < 50 * d {
            return Err(Error::InvalidSubproblem(format!(
                "max_inner_evals = {} below 50 d = {}",
                self.max_inner_evals,
                50 * d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SubsolverStatus {
    Converged,
    BudgetExhausted,
    Stalled,
}

#[derive(Debug, Clone)]
pub struct SubsolverResult {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub max_violation: f64,
    pub inner_evals_used: usize,
    pub status: SubsolverStatus,
}

/// Feasible-first ordering: a feasible result precedes an infeasible one;
/// two feasible results order by objective, two infeasible ones by violation.
pub fn merit_order(a: &SubsolverResult, b: &SubsolverResult) -> Ordering {
    merit_key_order(
        a.objective_value,
        a.max_violation,
        b.objective_value,
        b.max_violation,
    )
}

fn merit_key_order(fa: f64, va: f64, fb: f64, vb: f64) -> Ordering {
    let feas_a = va <= MERIT_FEASIBILITY_TOL;
    let feas_b = vb <= MERIT_FEASIBILITY_TOL;
    match (feas_a, feas_b) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => fa.partial_cmp(&fb).unwrap_or(Ordering::Equal),
        (false, false) => va.partial_cmp(&vb).unwrap_or(Ordering::Equal),
    }
}

struct Candidate {
    x: Vec<f64>,
    objective: f64,
    violation: f64,
}

#[derive(Default)]
struct Trace {
    evals: usize,
    current: Option<Candidate>,
    best: Option<Candidate>,
    nonfinite: Option<Vec<f64>>,
    debug_rows: Option<Vec<(usize, f64, f64)>>,
}

impl Trace {
    fn finalize_current(&mut self) {
        let Some(cand) = self.current.take() else { return };
        if let Some(rows) = self.debug_rows.as_mut() {
            rows.push((self.evals, cand.objective, cand.violation));
        }
        let replace = match &self.best {
            None => true,
            Some(best) => {
                merit_key_order(cand.objective, cand.violation, best.objective, best.violation)
                    == Ordering::Less
            }
        };
        if replace {
            self.best = Some(cand);
        }
    }
}

/// Minimizes the subproblem, spending at most `max_inner_evals` evaluations
/// of the objective (constraints are evaluated at the same points).
///
/// Deterministic given the spec. Returns the merit-best evaluated point.
pub fn minimize(spec: &SubproblemSpec<'_>) -> Result<SubsolverResult> {
    minimize_traced(spec, false).map(|(result, _)| result)
}

/// Like [`minimize`], optionally collecting one debug row per inner
/// evaluation: `(eval_index, objective, max_violation)`.
pub fn minimize_traced(
    spec: &SubproblemSpec<'_>,
    debug_trace: bool,
) -> Result<(SubsolverResult, Option<Vec<(usize, f64, f64)>>)> {
    spec.validate()?;
    let d = spec.lower.len();
    let trace = Rc::new(RefCell::new(Trace {
        debug_rows: debug_trace.then(Vec::new),
        ..Trace::default()
    }));

    let obj_trace = trace.clone();
    let objective = move |x: &[f64], _: &mut ()| {
        let mut t = obj_trace.borrow_mut();
        t.finalize_current();
        let value = (spec.objective)(x);
        if !value.is_finite() && t.nonfinite.is_none() {
            t.nonfinite = Some(x.to_vec());
        }
        t.evals += 1;
        t.current = Some(Candidate {
            x: x.to_vec(),
            objective: value,
            violation: 0.0,
        });
        if value.is_finite() { value } else { 1e300 }
    };

    let constraint_closures: Vec<Box<dyn Fn(&[f64], &mut ()) -> f64 + '_>> = spec
        .inequality_constraints
        .iter()
        .map(|c| {
            let tr = trace.clone();
            let f: Box<dyn Fn(&[f64], &mut ()) -> f64 + '_> = Box::new(move |x: &[f64], _: &mut ()| {
                let value = c(x);
                let mut t = tr.borrow_mut();
                if !value.is_finite() && t.nonfinite.is_none() {
                    t.nonfinite = Some(x.to_vec());
                }
                if let Some(cur) = t.current.as_mut() {
                    cur.violation = cur.violation.max(if value.is_finite() { value } else { 1e300 });
                }
                // the backend treats constraints as feasible when >= 0
                if value.is_finite() { -value } else { -1e300 }
            });
            f
        })
        .collect();
    let constraint_refs: Vec<&dyn Func<()>> =
        constraint_closures.iter().map(|b| b as &dyn Func<()>).collect();

    let bounds: Vec<(f64, f64)> = spec.lower.iter().zip(&spec.upper).map(|(&l, &u)| (l, u)).collect();
    let dx: Vec<f64> = bounds.iter().map(|(l, u)| TRUST_RADIUS_FRACTION * (u - l)).collect();
    let stop = StopTols {
        xtol_abs: vec![spec.convergence_tol; d],
        ..StopTols::default()
    };

    let outcome = cobyla::minimize(
        objective,
        &spec.start,
        &bounds,
        &constraint_refs,
        (),
        spec.max_inner_evals,
        RhoBeg::Set(dx),
        Some(stop),
    );

    let mut t = trace.borrow_mut();
    t.finalize_current();
    if let Some(x) = t.nonfinite.take() {
        return Err(Error::NonFiniteSurrogate { x });
    }

    let status = match &outcome {
        Ok((cobyla::SuccessStatus::MaxEvalReached, _, _)) => SubsolverStatus::BudgetExhausted,
        Ok(_) => SubsolverStatus::Converged,
        Err(_) => SubsolverStatus::Stalled,
    };

    let best = t.best.take().ok_or_else(|| {
        Error::InvalidSubproblem("subsolver made no evaluations".into())
    })?;
    let mut x = best.x;
    for i in 0..d {
        x[i] = x[i].clamp(spec.lower[i], spec.upper[i]);
    }
    let result = SubsolverResult {
        x,
        objective_value: best.objective,
        max_violation: best.violation.max(0.0),
        inner_evals_used: t.evals,
        status,
    };
    Ok((result, t.debug_rows.take()))
}

/// Writes a debug trace as CSV.
pub fn trace_csv<W: std::io::Write>(rows: &[(usize, f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "eval_index,objective,max_violation")?;
    for (i, f, v) in rows {
        writeln!(w, "{i},{f},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_spec<'a>(
        objective: Box<dyn Fn(&[f64]) -> f64 + 'a>,
        constraints: Vec<Box<dyn Fn(&[f64]) -> f64 + 'a>>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        start: Vec<f64>,
    ) -> SubproblemSpec<'a> {
        let d = lower.len();
        SubproblemSpec {
            objective,
            inequality_constraints: constraints,
            lower,
            upper,
            start,
            max_inner_evals: 400 * d,
            convergence_tol: 1e-7,
        }
    }

    #[test]
    fn unconstrained_sphere() {
        for d in [2usize, 5] {
            let spec = box_spec(
                Box::new(|x: &[f64]| x.iter().map(|v| v * v).sum()),
                vec![],
                vec![-2.0; d],
                vec![2.0; d],
                vec![1.0; d],
            );
            let r = minimize(&spec).unwrap();
            for (i, v) in r.x.iter().enumerate() {
                assert!(v.abs() <= 1e-4, "d={d}: x[{i}] = {v}");
            }
            assert!(r.inner_evals_used <= spec.max_inner_evals);
        }
    }

    #[test]
    fn linear_objective_active_constraint() {
        // min x1 + x2 s.t. 1 - x1 - x2 <= 0 on [0,2]^2: optimum 1 on the line
        let spec = box_spec(
            Box::new(|x: &[f64]| x[0] + x[1]),
            vec![Box::new(|x: &[f64]| 1.0 - x[0] - x[1])],
            vec![0.0, 0.0],
            vec![2.0, 2.0],
            vec![2.0, 2.0],
        );
        let r = minimize(&spec).unwrap();
        assert!((r.objective_value - 1.0).abs() <= 1e-3, "got {}", r.objective_value);
        assert!(r.max_violation <= MERIT_FEASIBILITY_TOL);
    }

    #[test]
    fn distance_constraint_pushes_away_from_start() {
        let x_prev = [0.4, -0.2];
        let rho = 0.3;
        let spec = box_spec(
            Box::new(|x: &[f64]| x[0]),
            vec![Box::new(move |x: &[f64]| {
                let dist: f64 = x
                    .iter()
                    .zip(&x_prev)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                rho - dist
            })],
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            x_prev.to_vec(),
        );
        let r = minimize(&spec).unwrap();
        let dist: f64 = r
            .x
            .iter()
            .zip(&x_prev)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist >= rho - 1e-6, "returned point at distance {dist}");
    }

    #[test]
    fn merit_order_rules() {
        let mk = |f: f64, v: f64| SubsolverResult {
            x: vec![],
            objective_value: f,
            max_violation: v,
            inner_evals_used: 0,
            status: SubsolverStatus::Converged,
        };
        assert_eq!(merit_order(&mk(5.0, 0.0), &mk(1.0, 0.5)), Ordering::Less);
        assert_eq!(merit_order(&mk(1.0, 0.0), &mk(2.0, 0.0)), Ordering::Less);
        assert_eq!(merit_order(&mk(9.0, 0.1), &mk(0.0, 0.2)), Ordering::Less);
    }

    #[test]
    fn deterministic_and_budget_respecting() {
        let run = || {
            let evals = std::cell::Cell::new(0usize);
            let spec = SubproblemSpec {
                objective: Box::new(|x: &[f64]| {
                    (x[0] - 0.3).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + (x[0] * x[1]).sin()
                }),
                inequality_constraints: vec![Box::new(|x: &[f64]| x[0] + x[1] - 0.4)],
                lower: vec![-1.0, -1.0],
                upper: vec![1.0, 1.0],
                start: vec![0.9, 0.9],
                max_inner_evals: 120,
                convergence_tol: 1e-9,
            };
            let counted = SubproblemSpec {
                objective: Box::new(|x: &[f64]| {
                    evals.set(evals.get() + 1);
                    (spec.objective)(x)
                }),
                inequality_constraints: spec.inequality_constraints,
                lower: spec.lower,
                upper: spec.upper,
                start: spec.start,
                max_inner_evals: spec.max_inner_evals,
                convergence_tol: spec.convergence_tol,
            };
            let r = minimize(&counted).unwrap();
            assert!(evals.get() <= 120, "objective evaluated {} times", evals.get());
            assert_eq!(r.inner_evals_used, evals.get());
            r
        };
        let a = run();
        let b = run();
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.inner_evals_used, b.inner_evals_used);
    }

    #[test]
    fn result_stays_in_bounds() {
        let spec = box_spec(
            Box::new(|x: &[f64]| -x[0] - 2.0 * x[1]),
            vec![],
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        );
        let r = minimize(&spec).unwrap();
        for v in &r.x {
            assert!(*v >= -1.0 - 1e-12 && *v <= 1.0 + 1e-12);
        }
        assert!((r.x[0] - 1.0).abs() <= 1e-4 && (r.x[1] - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn nonfinite_surrogate_reported_with_offender() {
        let spec = box_spec(
            Box::new(|x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] }),
            vec![],
            vec![-1.0],
            vec![1.0],
            vec![0.9],
        );
        match minimize(&spec) {
            Err(Error::NonFiniteSurrogate { x }) => assert!(x[0] > 0.5),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn start_outside_bounds_rejected() {
        let spec = box_spec(
            Box::new(|x: &[f64]| x[0]),
            vec![],
            vec![-1.0],
            vec![1.0],
            vec![2.0],
        );
        assert!(minimize(&spec).is_err());
    }

    /// Dense active-set oracle for convex QPs with a few linear constraints:
    /// enumerate active subsets, solve the KKT system, keep the feasible
    /// candidate with the lowest objective.
    mod qp_oracle {
        pub struct Qp {
            pub q: Vec<Vec<f64>>, // positive definite
            pub b: Vec<f64>,
            pub cons: Vec<(Vec<f64>, f64)>, // a.x <= c
        }

        fn solve(a: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>) -> Option<Vec<f64>> {
            let n = rhs.len();
            for col in 0..n {
                let piv = (col..n).max_by(|&i, &j| {
                    a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
                })?;
                if a[piv][col].abs() < 1e-12 {
                    return None;
                }
                a.swap(col, piv);
                rhs.swap(col, piv);
                for row in 0..n {
                    if row != col {
                        let f = a[row][col] / a[col][col];
                        for k in col..n {
                            a[row][k] -= f * a[col][k];
                        }
                        rhs[row] -= f * rhs[col];
                    }
                }
            }
            Some((0..n).map(|i| rhs[i] / a[i][i]).collect())
        }

        pub fn minimize(qp: &Qp) -> Vec<f64> {
            let d = qp.b.len();
            let m = qp.cons.len();
            let mut best: Option<(f64, Vec<f64>)> = None;
            for mask in 0..(1usize << m) {
                let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
                let k = active.len();
                if k > d {
                    continue;
                }
                let size = d + k;
                let mut a = vec![vec![0.0; size]; size];
                let mut rhs = vec![0.0; size];
                for i in 0..d {
                    for j in 0..d {
                        a[i][j] = qp.q[i][j];
                    }
                    rhs[i] = -qp.b[i];
                }
                for (idx, &ci) in active.iter().enumerate() {
                    for j in 0..d {
                        a[j][d + idx] = qp.cons[ci].0[j];
                        a[d + idx][j] = qp.cons[ci].0[j];
                    }
                    rhs[d + idx] = qp.cons[ci].1;
                }
                let Some(sol) = solve(&mut a, &mut rhs) else { continue };
                let x = &sol[..d];
                let multipliers = &sol[d..];
                if multipliers.iter().any(|&l| l < -1e-9) {
                    continue;
                }
                let feasible = qp.cons.iter().all(|(row, c)| {
                    row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= c + 1e-9
                });
                if !feasible {
                    continue;
                }
                let obj = 0.5
                    * x.iter()
                        .enumerate()
                        .map(|(i, xi)| {
                            xi * x.iter().enumerate().map(|(j, xj)| qp.q[i][j] * xj).sum::<f64>()
                        })
                        .sum::<f64>()
                    + qp.b.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                if best.as_ref().is_none_or(|(bo, _)| obj < *bo) {
                    best = Some((obj, x.to_vec()));
                }
            }
            best.expect("oracle: feasible active set exists").1
        }
    }

    #[test]
    fn matches_active_set_oracle_on_random_qps() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(99);
        for case in 0..12 {
            let d = rng.random_range(2..=8usize);
            let n_cons = rng.random_range(0..=3usize);
            // random SPD matrix: A^T A + d I
            let a: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let mut q = vec![vec![0.0; d]; d];
            for i in 0..d {
                for j in 0..d {
                    q[i][j] = (0..d).map(|k| a[k][i] * a[k][j]).sum::<f64>();
                }
                q[i][i] += d as f64;
            }
            let b: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            // constraints passing near the unconstrained optimum so some are active
            let cons: Vec<(Vec<f64>, f64)> = (0..n_cons)
                .map(|_| {
                    let row: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    (row, rng.random_range(-0.2..0.4))
                })
                .collect();
            let qp = qp_oracle::Qp { q: q.clone(), b: b.clone(), cons: cons.clone() };
            let want = qp_oracle::minimize(&qp);
            if want.iter().any(|v| v.abs() > 5.0) {
                continue; // keep the wide box inactive
            }

            let spec = SubproblemSpec {
                objective: Box::new(|x: &[f64]| {
                    0.5 * x
                        .iter()
                        .enumerate()
                        .map(|(i, xi)| {
                            xi * x.iter().enumerate().map(|(j, xj)| q[i][j] * xj).sum::<f64>()
                        })
                        .sum::<f64>()
                        + b.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                }),
                inequality_constraints: cons
                    .iter()
                    .map(|(row, c)| {
                        let row = row.clone();
                        let c = *c;
                        let f: Box<dyn Fn(&[f64]) -> f64> = Box::new(move |x: &[f64]| {
                            row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - c
                        });
                        f
                    })
                    .collect(),
                lower: vec![-10.0; d],
                upper: vec![10.0; d],
                start: vec![0.5; d],
                max_inner_evals: 2000 * d,
                convergence_tol: 1e-9,
            };
            let got = minimize(&spec).unwrap();
            for i in 0..d {
                assert!(
                    (got.x[i] - want[i]).abs() <= 1e-3,
                    "case {case}: x[{i}] = {} vs oracle {}",
                    got.x[i],
                    want[i]
                );
            }
        }
    }
}
