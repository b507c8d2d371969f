//! The G01--G11 constrained benchmark problems.
//!
//! Definitions follow the standard benchmark collection (Michalewicz &
//! Schoenauer; Floudas & Pardalos; the Runarsson & Yao appendices), with
//! maximization problems negated and equality constraints replaced by
//! one-sided inequalities. The conversion direction per equality is fixed
//! here (`EQUALITY_DIRECTIONS`): in each case `h(x) <= 0` is the side on
//! which the objective increases, which preserves the published optimum.
//! Optimum points are stored at high precision and audited by tests (maximum
//! constraint value at the optimum <= 1e-4, objective equal to the stored
//! optimum value).

use std::sync::Arc;

use super::{
    convert_equalities, ConstraintCounts, EqualityDirection, Evaluator, Problem,
};

/// Conversion directions for the equality constraints of G03, G05 (three) and
/// G11, in suite order. Flip here if an application needs the other side.
pub const EQUALITY_DIRECTIONS: [(&str, &[EqualityDirection]); 3] = [
    ("G03", &[EqualityDirection::Le]),
    (
        "G05",
        &[EqualityDirection::Le, EqualityDirection::Le, EqualityDirection::Le],
    ),
    ("G11", &[EqualityDirection::Le]),
];

fn ev(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Evaluator {
    Arc::new(f)
}

fn counts(li: usize, ni: usize, ne: usize, active: usize) -> ConstraintCounts {
    ConstraintCounts {
        linear_inequalities: li,
        nonlinear_inequalities: ni,
        nonlinear_equalities: ne,
        active_at_optimum: active,
    }
}

fn directions_for(name: &str) -> &'static [EqualityDirection] {
    EQUALITY_DIRECTIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .expect("suite problem with equalities")
}

fn g01() -> Problem {
    let lower = vec![0.0; 13];
    let mut upper = vec![1.0; 13];
    for i in 9..12 {
        upper[i] = 100.0;
    }
    let objective = ev(|x: &[f64]| {
        let head: f64 = x[..4].iter().map(|v| 5.0 * v - 5.0 * v * v).sum();
        let tail: f64 = x[4..13].iter().sum();
        head - tail
    });
    let constraints: Vec<Evaluator> = vec![
        ev(|x| 2.0 * x[0] + 2.0 * x[1] + x[9] + x[10] - 10.0),
        ev(|x| 2.0 * x[0] + 2.0 * x[2] + x[9] + x[11] - 10.0),
        ev(|x| 2.0 * x[1] + 2.0 * x[2] + x[10] + x[11] - 10.0),
        ev(|x| -8.0 * x[0] + x[9]),
        ev(|x| -8.0 * x[1] + x[10]),
        ev(|x| -8.0 * x[2] + x[11]),
        ev(|x| -2.0 * x[3] - x[4] + x[9]),
        ev(|x| -2.0 * x[5] - x[6] + x[10]),
        ev(|x| -2.0 * x[7] - x[8] + x[11]),
    ];
    let xstar = vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 1.0];
    Problem::new("G01", lower, upper, objective, constraints)
        .unwrap()
        .with_optimum(-15.0, Some(xstar))
        .with_facts("quadratic", counts(9, 0, 0, 6))
}

/// G02 in a configurable dimension. The commonly studied sizes are 10 and 20;
/// no optimizer point is stored (only approximately known), just the best
/// known objective value.
pub fn g02_with_dim(dim: usize) -> Problem {
    let d = dim;
    let objective = ev(move |x: &[f64]| {
        let sum4: f64 = x.iter().map(|v| v.cos().powi(4)).sum();
        let prod2: f64 = x.iter().map(|v| v.cos().powi(2)).product();
        let den: f64 = x
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * v * v)
            .sum::<f64>()
            .sqrt();
        if den == 0.0 {
            return 0.0;
        }
        -((sum4 - 2.0 * prod2) / den).abs()
    });
    let constraints: Vec<Evaluator> = vec![
        ev(|x| 0.75 - x.iter().product::<f64>()),
        ev(move |x| x.iter().sum::<f64>() - 7.5 * d as f64),
    ];
    let best_known = match dim {
        10 => -0.7473,
        20 => -0.803619,
        _ => f64::NAN,
    };
    let name = if dim == 10 { "G02".to_string() } else { format!("G02-{dim}d") };
    let mut p = Problem::new(name, vec![0.0; d], vec![10.0; d], objective, constraints)
        .unwrap()
        .with_facts("nonlinear", counts(1, 1, 0, 1));
    if best_known.is_finite() {
        p = p.with_optimum(best_known, None);
    }
    p
}

fn g03() -> Problem {
    let d = 20usize;
    let factor = (d as f64).sqrt().powi(d as i32);
    let objective = ev(move |x: &[f64]| -factor * x.iter().product::<f64>());
    let h: Evaluator = ev(|x| x.iter().map(|v| v * v).sum::<f64>() - 1.0);
    let constraints = convert_equalities(vec![h], directions_for("G03")).unwrap();
    let xstar = vec![1.0 / (d as f64).sqrt(); d];
    Problem::new("G03", vec![0.0; d], vec![1.0; d], objective, constraints)
        .unwrap()
        .with_optimum(-1.0, Some(xstar))
        .with_facts("nonlinear", counts(0, 0, 1, 1))
}

fn g04() -> Problem {
    let lower = vec![78.0, 33.0, 27.0, 27.0, 27.0];
    let upper = vec![102.0, 45.0, 45.0, 45.0, 45.0];
    let objective = ev(|x: &[f64]| {
        5.3578547 * x[2] * x[2] + 0.8356891 * x[0] * x[4] + 37.293239 * x[0] - 40792.141
    });
    let u = |x: &[f64]| {
        85.334407 + 0.0056858 * x[1] * x[4] + 0.0006262 * x[0] * x[3] - 0.0022053 * x[2] * x[4]
    };
    let v = |x: &[f64]| {
        80.51249 + 0.0071317 * x[1] * x[4] + 0.0029955 * x[0] * x[1] + 0.0021813 * x[2] * x[2]
    };
    let w = |x: &[f64]| {
        9.300961 + 0.0047026 * x[2] * x[4] + 0.0012547 * x[0] * x[2] + 0.0019085 * x[2] * x[3]
    };
    let constraints: Vec<Evaluator> = vec![
        ev(move |x| u(x) - 92.0),
        ev(move |x| -u(x)),
        ev(move |x| v(x) - 110.0),
        ev(move |x| 90.0 - v(x)),
        ev(move |x| w(x) - 25.0),
        ev(move |x| 20.0 - w(x)),
    ];
    let xstar = vec![78.0, 33.0, 29.995256025682, 45.0, 36.775812905788];
    Problem::new("G04", lower, upper, objective, constraints)
        .unwrap()
        .with_optimum(-30665.538671783317, Some(xstar))
        .with_facts("quadratic", counts(0, 6, 0, 2))
}

fn g05() -> Problem {
    let lower = vec![0.0, 0.0, -0.55, -0.55];
    let upper = vec![1200.0, 1200.0, 0.55, 0.55];
    let objective = ev(|x: &[f64]| {
        3.0 * x[0] + 1e-6 * x[0].powi(3) + 2.0 * x[1] + (2e-6 / 3.0) * x[1].powi(3)
    });
    let inequalities: Vec<Evaluator> = vec![
        ev(|x| x[2] - x[3] - 0.55),
        ev(|x| x[3] - x[2] - 0.55),
    ];
    let equalities: Vec<Evaluator> = vec![
        ev(|x| 1000.0 * (-x[2] - 0.25).sin() + 1000.0 * (-x[3] - 0.25).sin() + 894.8 - x[0]),
        ev(|x| 1000.0 * (x[2] - 0.25).sin() + 1000.0 * (x[2] - x[3] - 0.25).sin() + 894.8 - x[1]),
        ev(|x| 1000.0 * (x[3] - 0.25).sin() + 1000.0 * (x[3] - x[2] - 0.25).sin() + 1294.8),
    ];
    let mut constraints = inequalities;
    constraints.extend(convert_equalities(equalities, directions_for("G05")).unwrap());
    // Optimum of the converted (inequality) problem, polished from the
    // published equality-constrained point.
    let xstar = vec![
        679.9455683951395,
        1026.0668670312812,
        0.1188761872533232,
        -0.3962336373288653,
    ];
    Problem::new("G05", lower, upper, objective, constraints)
        .unwrap()
        .with_optimum(5126.498109582812, Some(xstar))
        .with_facts("nonlinear", counts(2, 0, 3, 3))
}

fn g06() -> Problem {
    let objective = ev(|x: &[f64]| (x[0] - 10.0).powi(3) + (x[1] - 20.0).powi(3));
    let constraints: Vec<Evaluator> = vec![
        ev(|x| -(x[0] - 5.0).powi(2) - (x[1] - 5.0).powi(2) + 100.0),
        ev(|x| (x[0] - 6.0).powi(2) + (x[1] - 5.0).powi(2) - 82.81),
    ];
    let xstar = vec![14.09500000000000064, 0.8429607892154795668];
    Problem::new("G06", vec![13.0, 0.0], vec![100.0, 100.0], objective, constraints)
        .unwrap()
        .with_optimum(-6961.813875580138, Some(xstar))
        .with_facts("nonlinear", counts(0, 2, 0, 2))
}

fn g07() -> Problem {
    let d = 10;
    let objective = ev(|x: &[f64]| {
        x[0] * x[0] + x[1] * x[1] + x[0] * x[1] - 14.0 * x[0] - 16.0 * x[1]
            + (x[2] - 10.0).powi(2)
            + 4.0 * (x[3] - 5.0).powi(2)
            + (x[4] - 3.0).powi(2)
            + 2.0 * (x[5] - 1.0).powi(2)
            + 5.0 * x[6] * x[6]
            + 7.0 * (x[7] - 11.0).powi(2)
            + 2.0 * (x[8] - 10.0).powi(2)
            + (x[9] - 7.0).powi(2)
            + 45.0
    });
    let constraints: Vec<Evaluator> = vec![
        ev(|x| -105.0 + 4.0 * x[0] + 5.0 * x[1] - 3.0 * x[6] + 9.0 * x[7]),
        ev(|x| 10.0 * x[0] - 8.0 * x[1] - 17.0 * x[6] + 2.0 * x[7]),
        ev(|x| -8.0 * x[0] + 2.0 * x[1] + 5.0 * x[8] - 2.0 * x[9] - 12.0),
        ev(|x| 3.0 * (x[0] - 2.0).powi(2) + 4.0 * (x[1] - 3.0).powi(2) + 2.0 * x[2] * x[2] - 7.0 * x[3] - 120.0),
        ev(|x| 5.0 * x[0] * x[0] + 8.0 * x[1] + (x[2] - 6.0).powi(2) - 2.0 * x[3] - 40.0),
        ev(|x| x[0] * x[0] + 2.0 * (x[1] - 2.0).powi(2) - 2.0 * x[0] * x[1] + 14.0 * x[4] - 6.0 * x[5]),
        ev(|x| 0.5 * (x[0] - 8.0).powi(2) + 2.0 * (x[1] - 4.0).powi(2) + 3.0 * x[4] * x[4] - x[5] - 30.0),
        ev(|x| -3.0 * x[0] + 6.0 * x[1] + 12.0 * (x[8] - 8.0).powi(2) - 7.0 * x[9]),
    ];
    let xstar = vec![
        2.17199634142692,
        2.3636830416034,
        8.77392573913157,
        5.09598443745173,
        0.990654756560493,
        1.43057392853463,
        1.32164415364306,
        9.82872576524495,
        8.2800915887356,
        8.3759266477347,
    ];
    Problem::new("G07", vec![-10.0; d], vec![10.0; d], objective, constraints)
        .unwrap()
        .with_optimum(24.30620906818, Some(xstar))
        .with_facts("quadratic", counts(3, 5, 0, 6))
}

fn g08() -> Problem {
    let objective = ev(|x: &[f64]| {
        let den = x[0].powi(3) * (x[0] + x[1]);
        if den == 0.0 {
            return 0.0;
        }
        -((2.0 * std::f64::consts::PI * x[0]).sin().powi(3)
            * (2.0 * std::f64::consts::PI * x[1]).sin())
            / den
    });
    let constraints: Vec<Evaluator> = vec![
        ev(|x| x[0] * x[0] - x[1] + 1.0),
        ev(|x| 1.0 - x[0] + (x[1] - 4.0).powi(2)),
    ];
    let xstar = vec![1.22797135260752599, 4.24537336612274885];
    Problem::new("G08", vec![0.0, 0.0], vec![10.0, 10.0], objective, constraints)
        .unwrap()
        .with_optimum(-0.09582504141835856, Some(xstar))
        .with_facts("nonlinear", counts(0, 2, 0, 0))
}

fn g09() -> Problem {
    let d = 7;
    let objective = ev(|x: &[f64]| {
        (x[0] - 10.0).powi(2)
            + 5.0 * (x[1] - 12.0).powi(2)
            + x[2].powi(4)
            + 3.0 * (x[3] - 11.0).powi(2)
            + 10.0 * x[4].powi(6)
            + 7.0 * x[5] * x[5]
            + x[6].powi(4)
            - 4.0 * x[5] * x[6]
            - 10.0 * x[5]
            - 8.0 * x[6]
    });
    let constraints: Vec<Evaluator> = vec![
        ev(|x| -127.0 + 2.0 * x[0] * x[0] + 3.0 * x[1].powi(4) + x[2] + 4.0 * x[3] * x[3] + 5.0 * x[4]),
        ev(|x| -282.0 + 7.0 * x[0] + 3.0 * x[1] + 10.0 * x[2] * x[2] + x[3] - x[4]),
        ev(|x| -196.0 + 23.0 * x[0] + x[1] * x[1] + 6.0 * x[5] * x[5] - 8.0 * x[6]),
        ev(|x| 4.0 * x[0] * x[0] + x[1] * x[1] - 3.0 * x[0] * x[1] + 2.0 * x[2] * x[2] + 5.0 * x[5] - 11.0 * x[6]),
    ];
    let xstar = vec![
        2.33049935147405174,
        1.95137236847114592,
        -0.477541399510615805,
        4.36572624923625874,
        -0.624486959100388983,
        1.03813099410962173,
        1.5942266780671519,
    ];
    Problem::new("G09", vec![-10.0; d], vec![10.0; d], objective, constraints)
        .unwrap()
        .with_optimum(680.6300573744239, Some(xstar))
        .with_facts("nonlinear", counts(0, 4, 0, 2))
}

fn g10() -> Problem {
    let lower = vec![100.0, 1000.0, 1000.0, 10.0, 10.0, 10.0, 10.0, 10.0];
    let upper = vec![10000.0, 10000.0, 10000.0, 1000.0, 1000.0, 1000.0, 1000.0, 1000.0];
    let objective = ev(|x: &[f64]| x[0] + x[1] + x[2]);
    let constraints: Vec<Evaluator> = vec![
        ev(|x| -1.0 + 0.0025 * (x[3] + x[5])),
        ev(|x| -1.0 + 0.0025 * (x[4] + x[6] - x[3])),
        ev(|x| -1.0 + 0.01 * (x[7] - x[4])),
        ev(|x| -x[0] * x[5] + 833.33252 * x[3] + 100.0 * x[0] - 83333.333),
        ev(|x| -x[1] * x[6] + 1250.0 * x[4] + x[1] * x[3] - 1250.0 * x[3]),
        ev(|x| -x[2] * x[7] + 1_250_000.0 + x[2] * x[4] - 2500.0 * x[4]),
    ];
    let xstar = vec![
        579.306685017979589,
        1359.97067807935605,
        5109.97065743133317,
        182.01769963061534,
        295.601173702746792,
        217.982300369384632,
        286.41652592786852,
        395.601173702746735,
    ];
    Problem::new("G10", lower, upper, objective, constraints)
        .unwrap()
        .with_optimum(7049.248020528666, Some(xstar))
        .with_facts("linear", counts(3, 3, 0, 3))
}

fn g11() -> Problem {
    let objective = ev(|x: &[f64]| x[0] * x[0] + (x[1] - 1.0).powi(2));
    let h: Evaluator = ev(|x| x[1] - x[0] * x[0]);
    let constraints = convert_equalities(vec![h], directions_for("G11")).unwrap();
    let xstar = vec![std::f64::consts::FRAC_1_SQRT_2, 0.5];
    Problem::new("G11", vec![-1.0, -1.0], vec![1.0, 1.0], objective, constraints)
        .unwrap()
        .with_optimum(0.75, Some(xstar))
        .with_facts("linear", counts(0, 0, 1, 1))
}

/// The eleven-problem suite in benchmark-table order, with G02 at d = 10.
pub fn g_suite() -> Vec<Problem> {
    vec![
        g01(),
        g02_with_dim(10),
        g03(),
        g04(),
        g05(),
        g06(),
        g07(),
        g08(),
        g09(),
        g10(),
        g11(),
    ]
}

/// The suite plus a twelfth entry: G02 at d = 20.
pub fn g_suite_with_g02_20d() -> Vec<Problem> {
    let mut suite = g_suite();
    suite.push(g02_with_dim(20));
    suite
}
