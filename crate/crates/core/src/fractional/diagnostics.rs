//! Finite-difference checks of stationarity and of the tangent-minorant
//! property of the transformed objectives.
//!
//! Directions are drawn uniformly on the unit sphere, restricted to the
//! feasible cone of the power box at `p` and renormalized. Steps are taken in
//! units of `pmax`, so `h` is dimensionless.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::transforms::{aux_rates, x_update, Transform};
use crate::error::{Error, Result};
use crate::network::{rates_unchecked, NetworkInstance};
use crate::percentile::slqp;
use crate::solver::{project, FeasibleSet};

/// Coordinates within this fraction of `pmax` of a bound count as active.
const ACTIVE_TOL: f64 = 1e-9;

/// `count` unit directions feasible at `p` for the box `[0, pmax]^K`.
pub fn sample_feasible_directions(p: &[f64], pmax: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.len();
    let set = FeasibleSet::power_box(n, pmax);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let mut d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        for (i, di) in d.iter_mut().enumerate() {
            let (at_lo, at_hi) = set.active_bounds(p, i, ACTIVE_TOL * pmax);
            if (at_lo && *di < 0.0) || (at_hi && *di > 0.0) {
                *di = 0.0;
            }
        }
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            d.iter_mut().for_each(|v| *v /= norm);
            out.push(d);
        }
    }
    out
}

/// `max_d (f(proj(p + h·pmax·d)) − f(p)) / h` over the given directions.
pub fn directional_stationarity<F>(f: F, pmax: f64, p: &[f64], directions: &[Vec<f64>], h: f64) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let set = FeasibleSet::power_box(p.len(), pmax);
    let f0 = f(p);
    directions
        .iter()
        .map(|d| {
            let moved: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + h * pmax * b).collect();
            (f(&project(&set, &moved)) - f0) / h
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn validate(inst: &NetworkInstance, kq: usize, p: &[f64], num_directions: usize, h: f64) -> Result<()> {
    inst.check_feasible(p)?;
    if kq == 0 || kq > inst.users() {
        return Err(Error::PercentileNumberOutOfRange {
            kq,
            len: inst.users(),
        });
    }
    if num_directions == 0 {
        return Err(Error::config("num_directions", "must be at least 1"));
    }
    if !(h > 0.0) {
        return Err(Error::config("h", "must be positive"));
    }
    Ok(())
}

/// Largest sampled one-sided difference quotient of `slqp(r(p), kq)`; close
/// to or below zero at a directional stationary point.
pub fn stationarity_check(
    inst: &NetworkInstance,
    kq: usize,
    p: &[f64],
    num_directions: usize,
    h: f64,
    seed: u64,
) -> Result<f64> {
    validate(inst, kq, p, num_directions, h)?;
    let p = project(&FeasibleSet::power_box(inst.users(), inst.pmax()), p);
    let dirs = sample_feasible_directions(&p, inst.pmax(), num_directions, seed);
    let f = |q: &[f64]| slqp(&rates_unchecked(inst, q), kq).expect("kq validated");
    Ok(directional_stationarity(f, inst.pmax(), &p, &dirs, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    /// `|aux(p) − orig(p)|` with `x` from the matching update at `p`.
    pub equality_gap: f64,
    /// Largest gap between second-order one-sided estimates `(4f(h/2) − f(h) − 3f(0))/h`
    /// of the directional derivatives of the two objectives.
    pub tangency_residual: f64,
    /// Same gap using plain forward quotients `(f(h) − f(0))/h`; carries an
    /// `O(h)` curvature term.
    pub first_order_residual: f64,
    /// Largest `aux(y) − orig(y)` over the sampled points `y` (≤ 0 for a minorant).
    pub minorization_violation: f64,
}

/// Compare the transformed objective (auxiliary variables frozen at `p`) with
/// the true objective near `p`.
pub fn minorant_tangency_check(
    inst: &NetworkInstance,
    kq: usize,
    transform: Transform,
    p: &[f64],
    num_directions: usize,
    h: f64,
    seed: u64,
) -> Result<TangencyReport> {
    validate(inst, kq, p, num_directions, h)?;
    let set = FeasibleSet::power_box(inst.users(), inst.pmax());
    let p = project(&set, p);
    let x = x_update(transform, inst, &p)?;
    let orig = |q: &[f64]| slqp(&rates_unchecked(inst, q), kq).expect("kq validated");
    let aux = |q: &[f64]| slqp(&aux_rates(transform, inst, &x, q), kq).expect("kq validated");

    let (o0, a0) = (orig(&p), aux(&p));
    let dirs = sample_feasible_directions(&p, inst.pmax(), num_directions, seed);
    let mut tangency_residual: f64 = 0.0;
    let mut first_order_residual: f64 = 0.0;
    let mut minorization_violation = a0 - o0;
    let step = |d: &[f64], t: f64| -> Vec<f64> {
        let y: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + t * inst.pmax() * b).collect();
        project(&set, &y)
    };
    for d in &dirs {
        let (y1, y2) = (step(d, h), step(d, 0.5 * h));
        let (o1, a1) = (orig(&y1), aux(&y1));
        let (o2, a2) = (orig(&y2), aux(&y2));
        let gap1 = (a1 - a0) - (o1 - o0);
        let gap2 = (a2 - a0) - (o2 - o0);
        first_order_residual = first_order_residual.max(gap1.abs() / h);
        tangency_residual = tangency_residual.max((4.0 * gap2 - gap1).abs() / h);
        minorization_violation = minorization_violation.max(a1 - o1).max(a2 - o2);
    }

    // Minorization is global, so also probe points far from p.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..num_directions {
        let y: Vec<f64> = (0..inst.users())
            .map(|_| inst.pmax() * rand::Rng::random::<f64>(&mut rng))
            .collect();
        minorization_violation = minorization_violation.max(aux(&y) - orig(&y));
    }

    Ok(TangencyReport {
        equality_gap: (a0 - o0).abs(),
        tangency_residual,
        first_order_residual,
        minorization_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_respect_active_bounds() {
        let p = [0.0, 1.0, 0.5];
        for d in sample_feasible_directions(&p, 1.0, 100, 3) {
            assert!(d[0] >= 0.0 && d[1] <= 0.0);
            assert!((d.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concave_toy_maximum_is_stationary() {
        let c = [0.3, 0.6];
        let f = |p: &[f64]| -(p[0] - c[0]).powi(2) - (p[1] - c[1]).powi(2);
        let dirs = sample_feasible_directions(&c, 1.0, 200, 1);
        assert!(directional_stationarity(f, 1.0, &c, &dirs, 1e-4) <= 1e-3);
    }

    #[test]
    fn zero_power_on_isolated_users_is_not_stationary() {
        let inst = NetworkInstance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], 0.1, 1.0).unwrap();
        let v = stationarity_check(&inst, 1, &[0.0, 0.0], 200, 1e-4, 0).unwrap();
        assert!(v > 1.0, "{v}");
    }

    #[test]
    fn tangency_at_smooth_point() {
        let inst = NetworkInstance::from_rows(
            &[vec![1.0, 0.2, 0.1], vec![0.1, 0.9, 0.3], vec![0.2, 0.1, 1.1]],
            0.1,
            1.0,
        )
        .unwrap();
        for t in [Transform::Quadratic, Transform::Logarithmic] {
            let r = minorant_tangency_check(&inst, 2, t, &[0.4, 0.7, 0.5], 200, 1e-4, 5).unwrap();
            assert!(r.equality_gap <= 1e-12);
            assert!(r.minorization_violation <= 1e-9);
            assert!(r.tangency_residual <= 1e-3, "{t:?}: {}", r.tangency_residual);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let inst = NetworkInstance::new(1, vec![1.0], 1.0, 1.0).unwrap();
        assert!(stationarity_check(&inst, 1, &[0.5], 0, 1e-4, 0).is_err());
        assert!(stationarity_check(&inst, 1, &[0.5], 10, 0.0, 0).is_err());
        assert!(stationarity_check(&inst, 2, &[0.5], 10, 1e-4, 0).is_err());
    }
}
