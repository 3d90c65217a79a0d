//! Reference heuristics the MM algorithms are compared against.

use super::mm::{inner_update, slqp_of_rates, MmOptions};
use super::transforms::{x_update, Transform};
use super::OuterTrace;
use crate::error::{Error, Result};
use crate::network::{random_powers, rates_unchecked, signal_interference_unchecked, NetworkInstance};
use crate::percentile::{slqp, slqp_supergradient};
use crate::solver::{maximize_concave, project, FeasibleSet, SolveResult, SolverOptions};

fn check_kq(inst: &NetworkInstance, kq: usize) -> Result<()> {
    if kq == 0 || kq > inst.users() {
        return Err(Error::PercentileNumberOutOfRange {
            kq,
            len: inst.users(),
        });
    }
    Ok(())
}

/// `∂r_k/∂p_j` for all `j`, added into `out` scaled by `w`.
fn add_rate_gradient(inst: &NetworkInstance, p: &[f64], k: usize, w: f64, out: &mut [f64]) {
    let (a, b) = signal_interference_unchecked(inst, p, k);
    let total = a + b;
    for (j, o) in out.iter_mut().enumerate() {
        let g = inst.gain(j, k);
        *o += w * if j == k { g / total } else { -a * g / (b * total) };
    }
}

/// Projected supergradient steps applied directly to the nonconcave
/// `slqp(r(p), kq)`. Returns the best iterate; no monotonicity guarantee.
///
/// Runs in `u = p / pmax` so step sizes do not depend on the power unit;
/// `opts.initial_step`, if set, is still in power units.
pub fn run_sga_baseline(
    inst: &NetworkInstance,
    kq: usize,
    opts: &SolverOptions,
    init: &[f64],
) -> Result<SolveResult> {
    check_kq(inst, kq)?;
    inst.check_feasible(init)?;
    let n = inst.users();
    let pmax = inst.pmax();
    let set = FeasibleSet::power_box(n, 1.0);
    let oracle = |u: &[f64]| {
        let p: Vec<f64> = u.iter().map(|u| u * pmax).collect();
        let r = rates_unchecked(inst, &p);
        let mask = slqp_supergradient(&r, kq).expect("kq checked above");
        let mut grad = vec![0.0; n];
        for k in mask.indices() {
            add_rate_gradient(inst, &p, k, pmax, &mut grad);
        }
        (mask.dot(&r), grad)
    };
    let scaled = SolverOptions {
        initial_step: opts.initial_step.map(|a0| a0 / pmax),
        ..opts.clone()
    };
    let u0: Vec<f64> = init.iter().map(|p| p / pmax).collect();
    let mut res = maximize_concave(oracle, &set, &scaled, &u0)?;
    for p in &mut res.p_star {
        *p = (*p * pmax).min(pmax);
    }
    Ok(res)
}

/// Weighted sum-rate maximization with `w_k ∝ 1/G_kk` (normalized to mean 1),
/// solved by quadratic-transform alternation. Reports `slqp(r(p), kq)` of the
/// final iterate; the trace records that metric per outer iteration and need
/// not be monotone.
pub fn run_cwsr_baseline(
    inst: &NetworkInstance,
    kq: usize,
    opts: &MmOptions,
    init: &[f64],
) -> Result<(SolveResult, OuterTrace)> {
    opts.validate()?;
    check_kq(inst, kq)?;
    inst.check_feasible(init)?;
    let n = inst.users();
    let raw: Vec<f64> = (0..n).map(|k| 1.0 / inst.gain(k, k)).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let weights: Vec<f64> = raw.iter().map(|w| w / mean).collect();
    let weighted_sum = |p: &[f64]| -> f64 { rates_unchecked(inst, p).iter().zip(&weights).map(|(r, w)| r * w).sum() };

    let set = FeasibleSet::power_box(n, inst.pmax());
    let mut p = project(&set, init);
    let mut utility = weighted_sum(&p);
    let mut trace = OuterTrace::default();
    let mut record = |iter: usize, p: &[f64], inner_iters: usize, inner_converged: bool| -> Result<()> {
        let value = slqp_of_rates(inst, p, kq)?;
        trace.records.push(super::OuterRecord {
            iter,
            objective: value,
            aux_objective: value,
            surrogate: f64::NAN,
            inner_iters,
            time_ms: 0.0,
            inner_converged,
        });
        Ok(())
    };
    record(0, &p, 0, true)?;

    let mut converged = false;
    for iter in 1..=opts.max_outer {
        let x = x_update(Transform::Quadratic, inst, &p)?;
        let inner = inner_update(inst, Transform::Quadratic, &x.x, Some(&weights), n, &p, &opts.inner)?;
        let next = project(&set, &inner.p_star);
        let next_utility = weighted_sum(&next);
        record(iter, &next, inner.iterations, inner.converged)?;
        let improvement = next_utility - utility;
        let previous = utility;
        p = next;
        utility = next_utility;
        if improvement < opts.tol * previous.abs().max(1e-12) {
            converged = true;
            break;
        }
    }

    let value = slqp_of_rates(inst, &p, kq)?;
    Ok((
        SolveResult {
            p_star: p,
            value,
            iterations: trace.outer_iterations(),
            trace: trace.objectives(),
            converged,
        },
        trace,
    ))
}

/// Sum-rate maximization (QFT with every user in the objective), evaluated at
/// percentile number `kq`. The trace holds the sum-rate objective.
pub fn run_sum_rate(
    inst: &NetworkInstance,
    kq: usize,
    opts: &MmOptions,
    init: &[f64],
) -> Result<(SolveResult, OuterTrace)> {
    check_kq(inst, kq)?;
    let (mut res, trace) = super::mm::run_qft(inst, inst.users(), opts, init)?;
    res.value = slqp_of_rates(inst, &res.p_star, kq)?;
    Ok((res, trace))
}

/// Uniform random powers in `[0, pmax]`.
pub fn run_random_baseline(inst: &NetworkInstance, kq: usize, seed: u64) -> Result<SolveResult> {
    check_kq(inst, kq)?;
    let p = random_powers(inst.users(), inst.pmax(), seed);
    let value = slqp(&rates_unchecked(inst, &p), kq)?;
    Ok(SolveResult {
        p_star: p,
        value,
        iterations: 0,
        trace: vec![value],
        converged: true,
    })
}
