//! Concave maximization over box and capped-simplex power sets.
//!
//! Two methods live here. [`maximize_concave`] is projected supergradient
//! ascent with `a0/√t` steps and best-iterate tracking; it only needs a value
//! and a supergradient. [`maximize_sum_smallest`] exploits the structure
//! `slqp(φ_1(p), …, φ_K(p))` with smooth concave `φ_k`, rewriting the sum of
//! the `Kq` smallest terms as `max_t Kq·t − Σ_k (t − φ_k)₊` and solving the
//! resulting smooth program with a log-barrier Newton method.

mod barrier;
mod subgradient;
mod waterfill;

pub use barrier::{maximize_sum_smallest, BarrierOptions, ConcaveTerms};
pub use subgradient::maximize_concave;
pub use waterfill::water_fill;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// `lo ≤ p ≤ hi` elementwise.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `p ≥ 0`, `Σ p ≤ p_total`.
    SimplexCap { p_total: f64 },
}

impl FeasibleSet {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) {
            return Err(Error::InvalidInstance("box requires finite lo ≤ hi".into()));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// `[0, cap]^n`.
    pub fn power_box(n: usize, cap: f64) -> Self {
        FeasibleSet::Box {
            lo: vec![0.0; n],
            hi: vec![cap; n],
        }
    }

    pub fn simplex_cap(p_total: f64) -> Result<Self> {
        if !(p_total > 0.0 && p_total.is_finite()) {
            return Err(Error::InvalidInstance(format!("p_total = {p_total} must be positive")));
        }
        Ok(FeasibleSet::SimplexCap { p_total })
    }

    /// Largest coordinate extent of the set; used to scale default steps.
    pub fn extent(&self) -> f64 {
        match self {
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| h - l)
                .fold(0.0, f64::max),
            FeasibleSet::SimplexCap { p_total } => *p_total,
        }
    }

    pub fn contains(&self, p: &[f64], slack: f64) -> bool {
        match self {
            FeasibleSet::Box { lo, hi } => {
                p.len() == lo.len()
                    && p.iter()
                        .zip(lo.iter().zip(hi))
                        .all(|(v, (l, h))| *v >= l - slack && *v <= h + slack)
            }
            FeasibleSet::SimplexCap { p_total } => {
                p.iter().all(|v| *v >= -slack) && p.iter().sum::<f64>() <= p_total + slack
            }
        }
    }

    /// Whether coordinate `i` sits on its lower / upper bound (within `tol`)
    /// for a box; for the capped simplex reports only the lower bound.
    pub(crate) fn active_bounds(&self, p: &[f64], i: usize, tol: f64) -> (bool, bool) {
        match self {
            FeasibleSet::Box { lo, hi } => (p[i] - lo[i] <= tol, hi[i] - p[i] <= tol),
            FeasibleSet::SimplexCap { .. } => (p[i] <= tol, false),
        }
    }
}

/// Euclidean projection onto the set.
pub fn project(set: &FeasibleSet, p: &[f64]) -> Vec<f64> {
    match set {
        FeasibleSet::Box { lo, hi } => p
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect(),
        FeasibleSet::SimplexCap { p_total } => {
            let clipped: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
            if clipped.iter().sum::<f64>() <= *p_total {
                clipped
            } else {
                project_simplex(p, *p_total)
            }
        }
    }
}

/// Projection onto `{p ≥ 0, Σp = total}` by the sorted-threshold rule.
fn project_simplex(p: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        cumsum += v;
        let candidate = (cumsum - total) / (i + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        }
    }
    p.iter().map(|v| (v - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Relative improvement of the best value over `window` iterations below
    /// which the supergradient method stops.
    pub tol: f64,
    /// Initial step `a0`; `None` uses a tenth of the set's extent.
    pub initial_step: Option<f64>,
    pub window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tol: 1e-8,
            initial_step: None,
            window: 50,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", "must be positive"));
        }
        if let Some(a0) = self.initial_step {
            if !(a0 > 0.0) {
                return Err(Error::config("initial_step", "must be positive"));
            }
        }
        if self.window == 0 {
            return Err(Error::config("window", "must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn step_for(&self, set: &FeasibleSet) -> f64 {
        self.initial_step.unwrap_or_else(|| set.extent() / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub p_star: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Best value found after each iteration (non-decreasing).
    pub trace: Vec<f64>,
    /// False when the iteration cap was hit before the stopping rule fired.
    pub converged: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn box_projection_clips() {
        let set = FeasibleSet::power_box(2, 1.0);
        assert_eq!(project(&set, &[2.0, -1.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn simplex_projection() {
        let set = FeasibleSet::simplex_cap(2.0).unwrap();
        assert_eq!(project(&set, &[0.5, 0.5]), vec![0.5, 0.5]);
        let p = project(&set, &[3.0, 1.0]);
        assert!((p[0] - 2.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert_eq!(project(&set, &[-1.0, 0.5]), vec![0.0, 0.5]);
    }

    #[test]
    fn simplex_projection_matches_grid_search() {
        // Brute-force the projection of (3, 1) onto {p ≥ 0, p0 + p1 ≤ 2}.
        let target = [3.0, 1.0];
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        let n = 400;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let q = [2.0 * i as f64 / n as f64, 2.0 * j as f64 / n as f64];
                let d = (q[0] - target[0]).powi(2) + (q[1] - target[1]).powi(2);
                if d < best.0 {
                    best = (d, q);
                }
            }
        }
        let p = project(&FeasibleSet::simplex_cap(2.0).unwrap(), &target);
        assert!((p[0] - best.1[0]).abs() <= 0.01 && (p[1] - best.1[1]).abs() <= 0.01);
    }

    #[test]
    fn projections_are_idempotent_and_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sets = [
            FeasibleSet::new_box(vec![-1.0, 0.0, 0.5, 0.0], vec![1.0, 2.0, 0.5, 3.0]).unwrap(),
            FeasibleSet::simplex_cap(1.5).unwrap(),
        ];
        for set in &sets {
            for _ in 0..2000 {
                let a: Vec<f64> = (0..4).map(|_| rng.random_range(-4.0..4.0)).collect();
                let b: Vec<f64> = (0..4).map(|_| rng.random_range(-4.0..4.0)).collect();
                let pa = project(set, &a);
                let pb = project(set, &b);
                assert!(set.contains(&pa, 1e-12));
                let again = project(set, &pa);
                assert!(norm(&pa.iter().zip(&again).map(|(x, y)| x - y).collect::<Vec<_>>()) <= 1e-12);
                let dp: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
                let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                assert!(norm(&dp) <= norm(&d) + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(FeasibleSet::new_box(vec![1.0], vec![0.0]).is_err());
        assert!(FeasibleSet::simplex_cap(0.0).is_err());
        assert!(SolverOptions { max_iters: 0, ..Default::default() }.validate().is_err());
        assert!(SolverOptions { tol: 0.0, ..Default::default() }.validate().is_err());
    }
}
