//! Dumps the adjustment trace of a single run (plog q history, scales, drc).

use sacobra_core::adjust::{run_sacobra, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite_with_g02_20d;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().cloned().unwrap_or_else(|| "G09".into());
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let problem = g_suite_with_g02_20d()
        .into_iter()
        .find(|p| p.name() == name)
        .expect("problem name");
    let mut params = CobraParams::defaults_for_dim(problem.dim());
    params.budget = budget;
    let rec = run_sacobra(&problem, &params, &SacobraOptions::default(), seed).unwrap();
    let trace = rec.adjustment.as_ref().unwrap();
    println!("problem={} seed={} budget={}", name, seed, budget);
    println!("fr_hat={:?} drc={:?}", trace.fr_hat, trace.drc_choice);
    println!("gr_hat={:?}", trace.gr_hat);
    println!("scales={:?}", trace.constraint_scales);
    println!("q_history={:?}", trace.q_history);
    println!("final_q={:?}", trace.final_q);
    println!("best_f={:?} err={:?}", rec.best_f, rec.final_error());
    let switches: Vec<(usize, bool)> = rec
        .rows
        .windows(2)
        .filter(|w| w[0].plog_active != w[1].plog_active)
        .map(|w| (w[1].eval_index, w[1].plog_active))
        .collect();
    println!("plog switches at: {switches:?}");
    let restarts = rec.rows.iter().filter(|r| r.restart).count();
    println!("restarts: {restarts}");
    let feas_infills = rec.rows.iter().skip(rec.params.n_init).filter(|r| r.feasible).count();
    println!("feasible infills: {} / {}", feas_infills, rec.rows.len() - rec.params.n_init);
    for row in rec.rows.iter().filter(|r| r.eval_index % 25 == 0) {
        println!("  eval {:3} eps {:.3e}", row.eval_index, row.eps);
    }
    if let Some(opt) = rec.optimum {
        for row in rec.rows.iter().filter(|r| r.eval_index % 25 == 0) {
            if let Some(b) = row.best_f {
                println!("  eval {:3}  err {:.4e}", row.eval_index, b - opt);
            }
        }
    }
}
// (appended) print error milestones
