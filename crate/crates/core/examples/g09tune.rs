//! Seed sweep on one problem with the current loop settings.
use sacobra_core::adjust::{median, run_sacobra, PlogMode, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite_with_g02_20d;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().cloned().unwrap_or_else(|| "G09".into());
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(15);
    let mode = match args.get(3).map(String::as_str) {
        Some("always") => PlogMode::Always,
        Some("never") => PlogMode::Never,
        _ => PlogMode::Adaptive,
    };
    let problem = g_suite_with_g02_20d().into_iter().find(|p| p.name() == name).unwrap();
    let mut params = CobraParams::defaults_for_dim(problem.dim());
    params.budget = budget;
    let options = SacobraOptions { plog: mode, ..Default::default() };
    let errors: Vec<f64> = (1..=seeds)
        .map(|s| {
            run_sacobra(&problem, &params, &options, s)
                .map(|r| r.final_error().unwrap_or(f64::INFINITY))
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    println!("{name} budget={budget} mode={mode:?} median={:.3e} {shown:?}", median(&errors));
}
