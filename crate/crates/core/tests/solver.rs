use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slqp_core::solver::{
    maximize_concave, maximize_sum_smallest, project, water_fill, BarrierOptions, ConcaveTerms, FeasibleSet,
    SolverOptions,
};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn quadratic(c: Vec<f64>) -> impl FnMut(&[f64]) -> (f64, Vec<f64>) {
    move |p: &[f64]| {
        let v = -p.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let g = p.iter().zip(&c).map(|(a, b)| -2.0 * (a - b)).collect();
        (v, g)
    }
}

#[test]
fn projection_examples() {
    let unit = FeasibleSet::power_box(2, 1.0);
    assert_eq!(project(&unit, &[2.0, -1.0]), vec![1.0, 0.0]);
    let cap = FeasibleSet::simplex_cap(2.0).unwrap();
    assert_eq!(project(&cap, &[0.5, 0.5]), vec![0.5, 0.5]);
    let p = project(&cap, &[3.0, 1.0]);
    assert!(dist(&p, &[2.0, 0.0]) < 1e-12);

    // Grid search over the feasible triangle.
    let target = [3.0, 1.0];
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..=400 {
        for j in 0..=(400 - i) {
            let q = [2.0 * i as f64 / 400.0, 2.0 * j as f64 / 400.0];
            let d = dist(&q, &target);
            if d < best.0 {
                best = (d, q);
            }
        }
    }
    assert!(dist(&p, &best.1) <= 0.01);
}

#[test]
fn quadratic_with_interior_maximum() {
    let set = FeasibleSet::power_box(3, 1.0);
    let c = vec![0.2, 0.5, 0.7];
    let res = maximize_concave(quadratic(c.clone()), &set, &SolverOptions::default(), &[1.0, 0.0, 1.0]).unwrap();
    assert!(res.value >= -1e-6, "{}", res.value);
    assert!(dist(&res.p_star, &c) < 1e-3);
    assert!(res.trace.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn symmetric_max_min_on_two_channels() {
    let set = FeasibleSet::simplex_cap(2.0).unwrap();
    let oracle = |p: &[f64]| {
        let r: Vec<f64> = p.iter().map(|v| v.max(0.0).ln_1p()).collect();
        let k = if r[0] <= r[1] { 0 } else { 1 };
        let mut g = vec![0.0; 2];
        g[k] = 1.0 / (1.0 + p[k]);
        (r[k], g)
    };
    let res = maximize_concave(oracle, &set, &SolverOptions::default(), &[2.0, 0.0]).unwrap();
    assert!(dist(&res.p_star, &[1.0, 1.0]) < 1e-2, "{:?}", res.p_star);
    assert!((res.value - 2f64.ln()).abs() < 1e-4);
}

#[test]
fn supergradient_sum_rate_matches_water_filling() {
    let z = [0.3, 1.2, 0.05, 2.0];
    let p_total = 1.7;
    let set = FeasibleSet::simplex_cap(p_total).unwrap();
    let oracle = |p: &[f64]| {
        let v = p.iter().zip(&z).map(|(p, z)| (p.max(0.0) / z).ln_1p()).sum();
        let g = p.iter().zip(&z).map(|(p, z)| 1.0 / (z + p.max(0.0))).collect();
        (v, g)
    };
    let res = maximize_concave(oracle, &set, &SolverOptions::default(), &[p_total / 4.0; 4]).unwrap();
    let wf: f64 = water_fill(&z, p_total).unwrap().iter().zip(&z).map(|(p, z)| (p / z).ln_1p()).sum();
    assert!((res.value - wf).abs() <= 1e-4 * wf, "{} vs {wf}", res.value);
}

#[test]
fn iteration_cap_is_reported() {
    let set = FeasibleSet::power_box(2, 1.0);
    let opts = SolverOptions {
        max_iters: 3,
        ..Default::default()
    };
    let res = maximize_concave(quadratic(vec![0.5, 0.5]), &set, &opts, &[0.0, 0.0]).unwrap();
    assert!(!res.converged);
    assert!(res.iterations <= 3);
}

#[test]
fn water_fill_examples() {
    assert_eq!(water_fill(&[1.0, 1.0], 2.0).unwrap(), vec![1.0, 1.0]);
    assert_eq!(water_fill(&[1.0], 3.0).unwrap(), vec![3.0]);
    let p = water_fill(&[0.5, 1.5], 1.0).unwrap();
    assert!(dist(&p, &[1.0, 0.0]) < 1e-12);
    assert!(water_fill(&[1.0, 0.0], 1.0).is_err());
    assert!(water_fill(&[1.0], -1.0).is_err());
}

#[test]
fn water_fill_dominates_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let z = [0.2, 0.9, 3.0, 0.05, 1.4];
    let p_total = 2.5;
    let rate = |p: &[f64]| p.iter().zip(&z).map(|(p, z)| (p / z).ln_1p()).sum::<f64>();
    let wf = water_fill(&z, p_total).unwrap();
    assert!((wf.iter().sum::<f64>() - p_total).abs() < 1e-12);
    assert!(wf.iter().all(|&v| v >= 0.0));
    let best = rate(&wf);
    for _ in 0..10_000 {
        let raw: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
        let scale = p_total * rng.random::<f64>() / raw.iter().sum::<f64>();
        let p: Vec<f64> = raw.iter().map(|v| v * scale).collect();
        assert!(rate(&p) <= best + 1e-12);
    }
}

/// `φ_k(p) = ln(1 + p_k / z_k)`.
struct Channels(Vec<f64>);

impl ConcaveTerms for Channels {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn terms(&self) -> usize {
        self.0.len()
    }
    fn value(&self, k: usize, p: &[f64]) -> f64 {
        (p[k] / self.0[k]).ln_1p()
    }
    fn eval(&self, k: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let n = self.0.len();
        grad.fill(0.0);
        let s = self.0[k] + p[k];
        grad[k] = 1.0 / s;
        hess[k * n + k] -= 1.0 / (s * s);
        self.value(k, p)
    }
}

#[test]
fn barrier_matches_grid_search_on_three_channels() {
    let z = vec![0.4, 1.0, 2.5];
    let set = FeasibleSet::simplex_cap(3.0).unwrap();
    for kq in 1..=3 {
        let res = maximize_sum_smallest(&Channels(z.clone()), kq, &set, &BarrierOptions::default(), &[1.0; 3]).unwrap();
        let mut grid = f64::NEG_INFINITY;
        let n = 300;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let p = [3.0 * i as f64 / n as f64, 3.0 * j as f64 / n as f64, 3.0 * (n - i - j) as f64 / n as f64];
                let mut r: Vec<f64> = (0..3).map(|k| (p[k] / z[k]).ln_1p()).collect();
                r.sort_by(f64::total_cmp);
                grid = grid.max(r[..kq].iter().sum());
            }
        }
        assert!(res.value >= grid - 1e-9, "kq {kq}: {} < {grid}", res.value);
        assert!(res.value <= grid + 2e-2, "kq {kq}: {} vs grid {grid}", res.value);
        assert!(res.p_star.iter().sum::<f64>() <= 3.0 + 1e-9);
    }
}

fn set_strategy(n: usize) -> impl Strategy<Value = FeasibleSet> {
    prop_oneof![
        prop::collection::vec((-2.0..0.0f64, 0.0..2.0f64), n)
            .prop_map(|b| FeasibleSet::new_box(b.iter().map(|x| x.0).collect(), b.iter().map(|x| x.1).collect()).unwrap()),
        (0.1..5.0f64).prop_map(|t| FeasibleSet::simplex_cap(t).unwrap()),
    ]
}

fn case() -> impl Strategy<Value = (FeasibleSet, Vec<f64>, Vec<f64>)> {
    (1usize..8).prop_flat_map(|n| {
        (
            set_strategy(n),
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(-5.0..5.0f64, n),
        )
    })
}

proptest! {
    #[test]
    fn projection_is_feasible_idempotent_nonexpansive((set, a, b) in case()) {
        let pa = project(&set, &a);
        let pb = project(&set, &b);
        prop_assert!(set.contains(&pa, 1e-9));
        prop_assert!(dist(&project(&set, &pa), &pa) <= 1e-12);
        prop_assert!(dist(&pa, &pb) <= dist(&a, &b) + 1e-12);
        // Variational inequality: (a − P a)·(y − P a) ≤ 0 for feasible y.
        let y = project(&set, &b);
        let vi: f64 = a.iter().zip(&pa).zip(&y).map(|((a, p), y)| (a - p) * (y - p)).sum();
        prop_assert!(vi <= 1e-9);
    }

    #[test]
    fn concave_quadratics_reach_the_projection((set, c, start) in case()) {
        let target = project(&set, &c);
        let optimum = -dist(&target, &c).powi(2);
        let res = maximize_concave(quadratic(c.clone()), &set, &SolverOptions::default(), &start).unwrap();
        prop_assert!(set.contains(&res.p_star, 1e-9));
        prop_assert!(res.trace.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(res.value <= optimum + 1e-12);
        prop_assert!(optimum - res.value <= 1e-5, "{} vs {}", res.value, optimum);
    }
}
