//! Compares forced plog-on vs plog-off runs on one problem.

use sacobra_core::adjust::{median, run_sacobra, PlogMode, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite_with_g02_20d;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().cloned().unwrap_or_else(|| "G09".into());
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(5);

    let problem = g_suite_with_g02_20d()
        .into_iter()
        .find(|p| p.name() == name)
        .expect("problem name");
    let mut params = CobraParams::defaults_for_dim(problem.dim());
    params.budget = budget;

    for mode in [PlogMode::Never, PlogMode::Always] {
        let options = SacobraOptions { plog: mode, ..Default::default() };
        let mut errors = Vec::new();
        for seed in 1..=seeds {
            let e = match run_sacobra(&problem, &params, &options, seed) {
                Ok(rec) => rec.final_error().unwrap_or(f64::INFINITY),
                Err(_) => f64::INFINITY,
            };
            errors.push(e);
        }
        let meds = median(&errors);
        let shown: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
        println!("{name} budget={budget} mode={mode:?} median_err={meds:.4e} errors={shown:?}");
    }
}
