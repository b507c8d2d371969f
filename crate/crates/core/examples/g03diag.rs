//! G03 infill geometry dump via a custom hook wrapper.
use sacobra_core::adjust::{rescale_problem, SacobraHooks, SacobraOptions};
use sacobra_core::cobra::{run_cobra, AdaptiveHooks, CobraParams, CobraState, IterationContext, StartChoice};
use sacobra_core::problems::g_suite;
use rand_chacha::ChaCha12Rng;

struct Spy {
    inner: SacobraHooks,
    iter: usize,
}

impl AdaptiveHooks for Spy {
    fn after_init(&mut self, s: &CobraState, p: &mut CobraParams, r: &mut ChaCha12Rng) {
        self.inner.after_init(s, p, r);
    }
    fn constraint_scales(&self) -> Option<&[f64]> { self.inner.constraint_scales() }
    fn plog_active(&self) -> bool { self.inner.plog_active() }
    fn choose_start(&mut self, s: &CobraState, r: &mut ChaCha12Rng) -> StartChoice {
        self.inner.choose_start(s, r)
    }
    fn after_evaluation(&mut self, ctx: &IterationContext<'_>, x_new: &[f64], f_new: f64) {
        self.iter += 1;
        if self.iter % 20 == 0 {
            let x: Vec<f64> = x_new.iter().map(|z| (z + 1.0) / 2.0).collect();
            let sumsq: f64 = x.iter().map(|v| v * v).sum();
            let minx = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let below = x.iter().filter(|v| **v < 0.02).count();
            println!(
                "iter {:3}  f_new {:10.3e}  sum x^2 {:6.3}  min x {:8.2e}  #x<0.02 {}",
                self.iter, f_new, sumsq, minx, below
            );
        }
        self.inner.after_evaluation(ctx, x_new, f_new);
    }
    fn trace(&self) -> Option<sacobra_core::cobra::AdjustmentTrace> { self.inner.trace() }
}

fn main() {
    let problem = &g_suite()[2];
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (scaled, _, _) = rescale_problem(problem).unwrap();
    let mut params = CobraParams::defaults_for_dim(problem.dim());
    params.budget = 300;
    let mut spy = Spy { inner: SacobraHooks::new(&scaled, SacobraOptions::default()), iter: 0 };
    let rec = run_cobra(&scaled, &params, seed, Some(&mut spy)).unwrap();
    println!("err = {:?}", rec.final_error());
}
