//! Quick convergence probe: runs a handful of seeds per problem and prints
//! the median final error and timing.

use std::time::Instant;

use sacobra_core::adjust::{run_sacobra, median, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite_with_g02_20d;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let filter = args.first().cloned().unwrap_or_default();
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);

    for problem in g_suite_with_g02_20d() {
        if !filter.is_empty() && !problem.name().contains(&filter) {
            continue;
        }
        let mut params = CobraParams::defaults_for_dim(problem.dim());
        params.budget = budget;
        let t0 = Instant::now();
        let mut errors = Vec::new();
        let mut infeasible = 0;
        for seed in 1..=seeds {
            match run_sacobra(&problem, &params, &SacobraOptions::default(), seed) {
                Ok(rec) => {
                    match rec.final_error() {
                        Some(e) => errors.push(e),
                        None => {
                            infeasible += 1;
                            errors.push(f64::INFINITY);
                        }
                    }
                }
                Err(e) => {
                    println!("{}: seed {seed} failed: {e}", problem.name());
                    errors.push(f64::INFINITY);
                }
            }
        }
        let med = median(&errors);
        println!(
            "{:8} d={:2} budget={} seeds={} median_err={:umed$.4e} infeas={} wall={:.1}s",
            problem.name(),
            problem.dim(),
            budget,
            seeds,
            med,
            infeasible,
            t0.elapsed().as_secs_f64(),
            umed = 12,
        );
    }
}
