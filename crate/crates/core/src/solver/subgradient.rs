use super::{project, FeasibleSet, SolveResult, SolverOptions};
use crate::error::{Error, Result};

/// Halvings tried when a step lands outside the oracle's domain.
const MAX_BACKTRACKS: usize = 40;

/// Projected supergradient ascent with clipped steps `a0/√t`.
///
/// The oracle returns `(value, supergradient)`; a non-finite value marks a
/// point outside the objective's domain, and such steps are halved until the
/// value is finite again. Returns the best iterate. `converged` is false when
/// `max_iters` ran out before the best value stalled for a full window.
pub fn maximize_concave<F>(
    mut oracle: F,
    set: &FeasibleSet,
    opts: &SolverOptions,
    init: &[f64],
) -> Result<SolveResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    opts.validate()?;
    if let FeasibleSet::Box { lo, .. } = set {
        if lo.len() != init.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: init.len(),
            });
        }
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::Infeasible("initial point is not finite".into()));
    }

    let a0 = opts.step_for(set);
    let mut p = project(set, init);
    let (mut value, mut grad) = oracle(&p);
    if !value.is_finite() {
        return Err(Error::Infeasible("objective is not finite at the initial point".into()));
    }

    let mut best_value = value;
    let mut best_p = p.clone();
    let mut window_start = best_value;
    let mut trace = Vec::with_capacity(opts.max_iters.min(100_000));
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=opts.max_iters {
        iterations = t;
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm == 0.0 || !gnorm.is_finite() {
            trace.push(best_value);
            converged = gnorm == 0.0;
            break;
        }

        // Clip by the feasible part of g, probed with a unit-direction step:
        // unit-length moves while it exceeds a0, raw supergradient steps once
        // it is small, so optima on the boundary are not circled.
        let base = a0 / (t as f64).sqrt();
        let probe_step = base / gnorm;
        let probe: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x + probe_step * g).collect();
        let moved = project(set, &probe)
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let mut step = base / (moved / probe_step).max(a0);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x + step * g).collect();
            let cand = project(set, &cand);
            let (v, g) = oracle(&cand);
            if v.is_finite() {
                accepted = Some((cand, v, g));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, v, g)) = accepted else {
            trace.push(best_value);
            break;
        };
        p = cand;
        value = v;
        grad = g;

        if value > best_value {
            best_value = value;
            best_p.clone_from(&p);
        }
        trace.push(best_value);

        if t % opts.window == 0 {
            let scale = window_start.abs().max(1.0);
            if best_value - window_start < opts.tol * scale {
                converged = true;
                break;
            }
            window_start = best_value;
        }
    }

    Ok(SolveResult {
        p_star: best_p,
        value: best_value,
        iterations,
        trace,
        converged,
    })
}
