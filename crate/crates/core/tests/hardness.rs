use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use slqp_core::error::Error;
use slqp_core::hardness::{
    achieving_assignment, brute_force_binary_optimum, build_instance, expected_optimum, mis_size, mis_witness,
    Canonical, ComponentGraph, MAX_BRUTE_FORCE_USERS,
};
use slqp_core::network::rates;
use slqp_core::percentile::slqp;

// Independence number by plain subset enumeration on local vertex ids.
fn mis_oracle(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|s| edges.iter().all(|&(a, b)| s >> a & 1 == 0 || s >> b & 1 == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap()
}

fn local_edges(g: &ComponentGraph) -> Vec<(usize, usize)> {
    let first = g.first_component_vertex();
    g.edges().iter().map(|&(a, b)| (a - first, b - first)).collect()
}

/// A random connected component: a random spanning tree plus extra edges.
fn random_graph(isolated: usize, kq: usize, extra: usize, seed: u64) -> ComponentGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..kq).map(|v| (isolated + rng.random_range(0..v), isolated + v)).collect();
    for _ in 0..extra {
        let a = rng.random_range(0..kq);
        let b = rng.random_range(0..kq);
        if a != b {
            edges.push((isolated + a, isolated + b));
        }
    }
    ComponentGraph::new(isolated + kq, kq, kq as f64 + 1.0 + rng.random::<f64>() * 5.0, &edges).unwrap()
}

#[test]
fn single_edge_reduction() {
    let g = ComponentGraph::new(3, 2, 3.0, &[(1, 2)]).unwrap();
    let inst = build_instance(&g).unwrap();
    let off: Vec<f64> = (0..3)
        .flat_map(|j| (0..3).filter(move |&k| k != j).map(move |k| (j, k)))
        .map(|(j, k)| inst.gain(j, k))
        .filter(|&v| v != 0.0)
        .collect();
    assert_eq!(off, vec![12.0, 12.0]);
    for k in 0..3 {
        assert_eq!(inst.gain(0, k), if k == 0 { 1.0 } else { 0.0 });
        assert_eq!(inst.gain(k, 0), if k == 0 { 1.0 } else { 0.0 });
    }
    let (_, best) = brute_force_binary_optimum(&inst, 2).unwrap();
    assert!((best - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    assert!((expected_optimum(&g).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-15);
}

#[test]
fn five_cycle_reduction() {
    let g = ComponentGraph::canonical(Canonical::Cycle, 5, 5, 6.0).unwrap();
    assert_eq!(mis_size(&g).unwrap(), 2);
    let inst = build_instance(&g).unwrap();
    let (p, best) = brute_force_binary_optimum(&inst, 5).unwrap();
    let want = 2.0 * (7.0f64 / 6.0).ln();
    assert!((best - want).abs() < 1e-12);
    assert!((slqp(&rates(&inst, &p).unwrap(), 5).unwrap() - best).abs() < 1e-15);
    let witness = achieving_assignment(&g).unwrap();
    assert!((slqp(&rates(&inst, &witness).unwrap(), 5).unwrap() - want).abs() < 1e-12);
}

#[test]
fn small_independence_numbers() {
    assert_eq!(mis_size(&ComponentGraph::new(2, 2, 3.0, &[(0, 1)]).unwrap()).unwrap(), 1);
    assert_eq!(mis_size(&ComponentGraph::canonical(Canonical::Path, 0, 3, 4.0).unwrap()).unwrap(), 2);
    let c5 = ComponentGraph::canonical(Canonical::Cycle, 0, 5, 6.0).unwrap();
    assert_eq!(mis_size(&c5).unwrap(), mis_oracle(5, &local_edges(&c5)));
    let star = ComponentGraph::canonical(Canonical::Star, 1, 6, 7.0).unwrap();
    assert_eq!(mis_witness(&star).unwrap(), vec![2, 3, 4, 5, 6]);
}

#[test]
fn optimum_vanishes_monotonically_in_l() {
    let mut prev = f64::INFINITY;
    for l in [6.0, 10.0, 100.0, 1e4, 1e8, 1e12] {
        let v = expected_optimum(&ComponentGraph::canonical(Canonical::Cycle, 5, 5, l).unwrap()).unwrap();
        assert!(v < prev && v > 0.0);
        prev = v;
    }
    assert!(prev < 1e-11);
}

#[test]
fn rejects_bad_graphs() {
    assert!(matches!(ComponentGraph::new(2, 1, 3.0, &[]), Err(Error::InvalidGraph(_))));
    assert!(matches!(ComponentGraph::new(3, 2, 2.0, &[(1, 2)]), Err(Error::InvalidGraph(_))));
    assert!(matches!(ComponentGraph::new(4, 3, 5.0, &[(1, 2)]), Err(Error::InvalidGraph(_))));
    assert!(matches!(ComponentGraph::new(4, 2, 5.0, &[(1, 3)]), Err(Error::InvalidGraph(_))));
    assert!(matches!(ComponentGraph::new(3, 2, 5.0, &[(2, 2)]), Err(Error::InvalidGraph(_))));

    let big = ComponentGraph::canonical(Canonical::Path, 18, 3, 4.0).unwrap();
    let inst = build_instance(&big).unwrap();
    assert!(inst.users() > MAX_BRUTE_FORCE_USERS);
    assert!(matches!(brute_force_binary_optimum(&inst, 3), Err(Error::TooLarge { .. })));
}

#[test]
fn edge_list_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = random_graph(3, 6, 4, 11);
    let path = dir.path().join("g.txt");
    g.save(&path).unwrap();
    assert_eq!(ComponentGraph::load(&path).unwrap(), g);

    let text = "# comment\n5 3 4.5\n\n3 4\n5 4\n4 3\n";
    let parsed = ComponentGraph::parse_edge_list(text).unwrap();
    assert_eq!(parsed.edges(), &[(2, 3), (3, 4)]);
    assert_eq!(parsed.l(), 4.5);

    match ComponentGraph::parse_edge_list("5 3 4.5\n3 x\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(ComponentGraph::parse_edge_list(""), Err(Error::Parse { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn brute_force_matches_independence_number(
        isolated in 0usize..5,
        kq in 2usize..8,
        extra in 0usize..10,
        seed in any::<u64>(),
    ) {
        let g = random_graph(isolated, kq, extra, seed);
        let mis = mis_oracle(kq, &local_edges(&g));
        prop_assert_eq!(mis_size(&g).unwrap(), mis);
        let want = mis as f64 * g.l().recip().ln_1p();
        let inst = build_instance(&g).unwrap();
        let (_, best) = brute_force_binary_optimum(&inst, kq).unwrap();
        prop_assert!((best - want).abs() <= 1e-9);
        let p = achieving_assignment(&g).unwrap();
        prop_assert!((slqp(&rates(&inst, &p).unwrap(), kq).unwrap() - want).abs() <= 1e-9);
    }

    #[test]
    fn no_continuous_point_beats_the_binary_optimum(
        isolated in 0usize..4,
        kq in 2usize..7,
        extra in 0usize..6,
        seed in any::<u64>(),
        points in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 10), 50),
    ) {
        let g = random_graph(isolated, kq, extra, seed);
        let inst = build_instance(&g).unwrap();
        let n = inst.users();
        let (_, best) = brute_force_binary_optimum(&inst, kq).unwrap();
        for p in &points {
            prop_assert!(slqp(&rates(&inst, &p[..n]).unwrap(), kq).unwrap() <= best + 1e-12);
        }
    }
}

// Per-coordinate convexity does not hold in general: raising one power lifts
// its own selected rate until the interference it causes swaps another user
// into the Kq smallest, which puts a concave kink inside [0, pmax].
#[test]
fn coordinate_slice_can_peak_inside_the_box() {
    let g = ComponentGraph::new(5, 3, 7.327524357822606, &[(2, 3), (3, 4)]).unwrap();
    let inst = build_instance(&g).unwrap();
    let at = |v: f64| slqp(&rates(&inst, &[0.0, 0.0, 1.0, 1.0, v]).unwrap(), 3).unwrap();
    let inside = (1..100).map(|i| at(i as f64 / 100.0)).fold(f64::NEG_INFINITY, f64::max);
    assert!(inside > at(0.0).max(at(1.0)) + 1e-3, "{inside} vs {} {}", at(0.0), at(1.0));
    let (_, best) = brute_force_binary_optimum(&inst, 3).unwrap();
    assert!(inside < best);
}
