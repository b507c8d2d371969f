//! Distance of final best to the known optimizer, per seed.
use sacobra_core::adjust::{run_sacobra, SacobraOptions};
use sacobra_core::cobra::CobraParams;
use sacobra_core::problems::g_suite;

fn main() {
    let problem = &g_suite()[8];
    let xstar = problem.optimum_point().unwrap().to_vec();
    let mut params = CobraParams::defaults_for_dim(problem.dim());
    params.budget = 300;
    for seed in 1..=8u64 {
        let rec = run_sacobra(problem, &params, &SacobraOptions::default(), seed).unwrap();
        let bx = rec.best_x.clone().unwrap();
        let dist: f64 = bx.iter().zip(&xstar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let err = rec.final_error().unwrap();
        println!("seed {seed}: err {err:9.3e}  |x-x*| {dist:9.3e}  x={bx:.4?}");
    }
}
