//! Tail-kind comparison on one problem.
use sacobra_core::adjust::{median, run_sacobra, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite_with_g02_20d;
use sacobra_core::surrogate::TailKind;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().cloned().unwrap_or_else(|| "G03".into());
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let problem = g_suite_with_g02_20d().into_iter().find(|p| p.name() == name).unwrap();
    for tail in [TailKind::Linear, TailKind::LinearPlusSquares] {
        let mut params = CobraParams::defaults_for_dim(problem.dim());
        params.budget = budget;
        params.tail = tail;
        let errors: Vec<f64> = (1..=seeds)
            .map(|s| {
                run_sacobra(&problem, &params, &SacobraOptions::default(), s)
                    .map(|r| r.final_error().unwrap_or(f64::INFINITY))
                    .unwrap_or(f64::INFINITY)
            })
            .collect();
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
        println!("{name} budget={budget} tail={tail:?} median={:.3e} {shown:?}", median(&errors));
    }
}
