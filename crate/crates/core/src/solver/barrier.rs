//! Log-barrier Newton method for `max_p slqp(φ_1(p), …, φ_K(p))`.
//!
//! With `Kq < K` the problem is lifted to
//!
//! ```text
//! maximize   Kq·t − Σ_k s_k
//! subject to φ_k(p) − t + s_k ≥ 0,  s_k ≥ 0,  p ∈ set
//! ```
//!
//! whose optimal value equals the sum of the `Kq` smallest `φ_k`. With
//! `Kq = K` the terms are summed directly.

use nalgebra::{DMatrix, DVector};

use super::{project, FeasibleSet, SolveResult};
use crate::error::{Error, Result};
use crate::percentile::slqp;

/// Smooth concave terms `φ_k : Rⁿ → R`.
pub trait ConcaveTerms {
    fn dim(&self) -> usize;

    fn terms(&self) -> usize;

    /// `φ_k(p)`; non-finite outside the domain.
    fn value(&self, k: usize, p: &[f64]) -> f64;

    /// `φ_k(p)`, writing `∇φ_k` into `grad` and adding `∇²φ_k` into the dense
    /// row-major `hess` (both of length/size `dim`). Non-finite outside the domain.
    fn eval(&self, k: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64;

    fn values(&self, p: &[f64]) -> Vec<f64> {
        (0..self.terms()).map(|k| self.value(k, p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierOptions {
    /// Stop once the barrier duality-gap bound `m/τ` drops below this.
    pub gap_tol: f64,
    /// Growth factor of `τ` between centering steps.
    pub mu: f64,
    pub max_newton: usize,
    /// Newton decrement `λ²/2` below which centering stops.
    pub newton_tol: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-9,
            mu: 10.0,
            max_newton: 100,
            newton_tol: 1e-10,
        }
    }
}

struct Problem<'a, T: ConcaveTerms + ?Sized> {
    terms: &'a T,
    set: &'a FeasibleSet,
    kq: usize,
    n: usize,
    m: usize,
    lifted: bool,
}

impl<'a, T: ConcaveTerms + ?Sized> Problem<'a, T> {
    fn nvars(&self) -> usize {
        if self.lifted {
            self.n + 1 + self.m
        } else {
            self.n
        }
    }

    fn barrier_count(&self) -> usize {
        let set_terms = match self.set {
            FeasibleSet::Box { .. } => 2 * self.n,
            FeasibleSet::SimplexCap { .. } => self.n + 1,
        };
        set_terms + if self.lifted { 2 * self.m } else { 0 }
    }

    /// Barrier objective `τ·obj + Σ ln(slacks)`; `-inf` when infeasible.
    fn phi(&self, y: &[f64], tau: f64) -> f64 {
        let p = &y[..self.n];
        let Some(set_barrier) = self.set_barrier(p) else {
            return f64::NEG_INFINITY;
        };
        let mut total = set_barrier;
        if self.lifted {
            let t = y[self.n];
            let s = &y[self.n + 1..];
            let mut obj = self.kq as f64 * t;
            for k in 0..self.m {
                let phi_k = self.terms.value(k, p);
                let c = phi_k - t + s[k];
                if !(c > 0.0 && s[k] > 0.0) || !phi_k.is_finite() {
                    return f64::NEG_INFINITY;
                }
                obj -= s[k];
                total += c.ln() + s[k].ln();
            }
            total += tau * obj;
        } else {
            let mut obj = 0.0;
            for k in 0..self.m {
                let v = self.terms.value(k, p);
                if !v.is_finite() {
                    return f64::NEG_INFINITY;
                }
                obj += v;
            }
            total += tau * obj;
        }
        total
    }

    fn set_barrier(&self, p: &[f64]) -> Option<f64> {
        let mut total = 0.0;
        match self.set {
            FeasibleSet::Box { lo, hi } => {
                for i in 0..self.n {
                    let a = p[i] - lo[i];
                    let b = hi[i] - p[i];
                    if !(a > 0.0 && b > 0.0) {
                        return None;
                    }
                    total += a.ln() + b.ln();
                }
            }
            FeasibleSet::SimplexCap { p_total } => {
                let mut sum = 0.0;
                for &v in p {
                    if !(v > 0.0) {
                        return None;
                    }
                    total += v.ln();
                    sum += v;
                }
                let slack = p_total - sum;
                if !(slack > 0.0) {
                    return None;
                }
                total += slack.ln();
            }
        }
        Some(total)
    }

    /// Gradient and Hessian of the barrier objective.
    fn derivatives(&self, y: &[f64], tau: f64, grad: &mut DVector<f64>, hess: &mut DMatrix<f64>) {
        let n = self.n;
        let nv = self.nvars();
        grad.fill(0.0);
        hess.fill(0.0);
        let p = &y[..n];

        match self.set {
            FeasibleSet::Box { lo, hi } => {
                for i in 0..n {
                    let a = p[i] - lo[i];
                    let b = hi[i] - p[i];
                    grad[i] += 1.0 / a - 1.0 / b;
                    hess[(i, i)] -= 1.0 / (a * a) + 1.0 / (b * b);
                }
            }
            FeasibleSet::SimplexCap { p_total } => {
                let slack = p_total - p.iter().sum::<f64>();
                for i in 0..n {
                    grad[i] += 1.0 / p[i] - 1.0 / slack;
                    hess[(i, i)] -= 1.0 / (p[i] * p[i]);
                    for j in 0..n {
                        hess[(i, j)] -= 1.0 / (slack * slack);
                    }
                }
            }
        }

        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n * n];
        if self.lifted {
            let t = y[n];
            let s = &y[n + 1..];
            grad[n] += tau * self.kq as f64;
            for k in 0..self.m {
                g.fill(0.0);
                h.fill(0.0);
                let phi_k = self.terms.eval(k, p, &mut g, &mut h);
                let c = phi_k - t + s[k];
                let sk = n + 1 + k;
                grad[sk] += -tau + 1.0 / s[k];
                hess[(sk, sk)] -= 1.0 / (s[k] * s[k]);

                // ∇c = (∇φ_k, −1, e_k); ∇²c = blockdiag(∇²φ_k, 0, 0).
                let inv_c = 1.0 / c;
                let inv_c2 = inv_c * inv_c;
                for i in 0..n {
                    grad[i] += g[i] * inv_c;
                }
                grad[n] -= inv_c;
                grad[sk] += inv_c;
                for i in 0..n {
                    for j in 0..n {
                        hess[(i, j)] += h[i * n + j] * inv_c - g[i] * g[j] * inv_c2;
                    }
                    // Cross terms with t (coefficient −1) and s_k (+1).
                    hess[(i, n)] += g[i] * inv_c2;
                    hess[(n, i)] += g[i] * inv_c2;
                    hess[(i, sk)] -= g[i] * inv_c2;
                    hess[(sk, i)] -= g[i] * inv_c2;
                }
                hess[(n, n)] -= inv_c2;
                hess[(sk, sk)] -= inv_c2;
                hess[(n, sk)] += inv_c2;
                hess[(sk, n)] += inv_c2;
            }
        } else {
            for k in 0..self.m {
                g.fill(0.0);
                h.fill(0.0);
                self.terms.eval(k, p, &mut g, &mut h);
                for i in 0..n {
                    grad[i] += tau * g[i];
                    for j in 0..n {
                        hess[(i, j)] += tau * h[i * n + j];
                    }
                }
            }
        }
        debug_assert_eq!(grad.len(), nv);
    }

    /// Strictly interior starting point near `init`.
    fn interior_start(&self, init: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let p0 = project(self.set, init);
        let centre: Vec<f64> = match self.set {
            FeasibleSet::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            FeasibleSet::SimplexCap { p_total } => vec![p_total / (n + 1) as f64; n],
        };
        for &w in &[1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let p: Vec<f64> = p0.iter().zip(&centre).map(|(a, c)| (1.0 - w) * a + w * c).collect();
            if self.set_barrier(&p).is_none() {
                continue;
            }
            let phis = self.terms.values(&p);
            if phis.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let mut y = p;
            if self.lifted {
                let t = phis.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
                y.push(t);
                y.extend(phis.iter().map(|phi| (t - phi).max(0.0) + 1.0));
            }
            return Some(y);
        }
        None
    }
}

fn solve_newton(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    // Newton step for a concave function: (−H) Δ = ∇.
    let neg = -hess;
    let scale = neg.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut m = neg.clone();
        if shift > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += shift;
            }
        }
        if let Some(ch) = m.cholesky() {
            let d = ch.solve(grad);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        shift = if shift == 0.0 { scale * 1e-14 } else { shift * 100.0 };
    }
    None
}

/// Maximize the sum of the `kq` smallest terms over `set`, starting near `init`.
///
/// The returned value is never below the objective at the projection of
/// `init`; if Newton cannot improve on it, that point is returned.
pub fn maximize_sum_smallest<T: ConcaveTerms + ?Sized>(
    terms: &T,
    kq: usize,
    set: &FeasibleSet,
    opts: &BarrierOptions,
    init: &[f64],
) -> Result<SolveResult> {
    let n = terms.dim();
    let m = terms.terms();
    if kq == 0 || kq > m {
        return Err(Error::PercentileNumberOutOfRange { kq, len: m });
    }
    if init.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: init.len(),
        });
    }
    if let FeasibleSet::Box { lo, .. } = set {
        if lo.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lo.len(),
            });
        }
    }
    let problem = Problem {
        terms,
        set,
        kq,
        n,
        m,
        lifted: kq < m,
    };

    let objective = |p: &[f64]| -> f64 {
        let vals = terms.values(p);
        if vals.iter().any(|v| !v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        slqp(&vals, kq).unwrap_or(f64::NEG_INFINITY)
    };
    let start_p = project(set, init);
    let start_value = objective(&start_p);

    let degenerate = match set {
        FeasibleSet::Box { lo, hi } => lo.iter().zip(hi).any(|(l, h)| l >= h),
        FeasibleSet::SimplexCap { .. } => false,
    };
    let y0 = if degenerate { None } else { problem.interior_start(init) };
    let Some(mut y) = y0 else {
        return Ok(SolveResult {
            p_star: start_p,
            value: start_value,
            iterations: 0,
            trace: vec![start_value],
            converged: false,
        });
    };

    let nv = problem.nvars();
    let barrier_terms = problem.barrier_count() as f64;
    let mut grad = DVector::zeros(nv);
    let mut hess = DMatrix::zeros(nv, nv);
    let mut tau = 1.0;
    let mut trace = Vec::new();
    let mut newton_steps = 0;
    let mut converged = true;

    loop {
        let mut centered = false;
        for _ in 0..opts.max_newton {
            problem.derivatives(&y, tau, &mut grad, &mut hess);
            let Some(step) = solve_newton(&hess, &grad) else {
                break;
            };
            let decrement = grad.dot(&step);
            newton_steps += 1;
            if !(decrement.is_finite()) || decrement / 2.0 <= opts.newton_tol {
                centered = true;
                break;
            }
            let phi0 = problem.phi(&y, tau);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let cand: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                let phi1 = problem.phi(&cand, tau);
                if phi1.is_finite() && phi1 >= phi0 + 0.25 * alpha * decrement {
                    y = cand;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                // Numerical floor reached for this τ.
                centered = true;
                break;
            }
        }
        if !centered {
            converged = false;
        }
        trace.push(objective(&project(set, &y[..n])));
        if barrier_terms / tau < opts.gap_tol {
            break;
        }
        tau *= opts.mu;
    }

    let p = project(set, &y[..n]);
    let value = objective(&p);
    let (p_star, value) = if value >= start_value || !start_value.is_finite() {
        (p, value)
    } else {
        (start_p, start_value)
    };
    let mut best = f64::NEG_INFINITY;
    for v in trace.iter_mut() {
        best = best.max(*v);
        *v = best;
    }
    Ok(SolveResult {
        p_star,
        value,
        iterations: newton_steps,
        trace,
        converged,
    })
}
