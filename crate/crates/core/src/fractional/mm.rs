use std::time::Instant;

use super::transforms::{aux_rates, x_update, AuxTerms, Transform};
use super::{OuterRecord, OuterTrace};
use crate::error::{Error, Result};
use crate::network::{rates_unchecked, NetworkInstance};
use crate::percentile::{slqp, slqp_supergradient};
use crate::solver::{
    maximize_concave, maximize_sum_smallest, project, BarrierOptions, ConcaveTerms, FeasibleSet, SolveResult,
    SolverOptions,
};

/// How the concave power update is solved.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerSolver {
    /// Log-barrier Newton on the lifted sum-of-smallest program.
    Barrier(BarrierOptions),
    /// Projected supergradient ascent on the transformed objective.
    Supergradient(SolverOptions),
}

impl Default for InnerSolver {
    fn default() -> Self {
        InnerSolver::Barrier(BarrierOptions::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmOptions {
    pub max_outer: usize,
    /// Stop when the objective improves by less than this, relative.
    pub tol: f64,
    pub inner: InnerSolver,
}

impl Default for MmOptions {
    fn default() -> Self {
        Self {
            max_outer: 100,
            tol: 1e-6,
            inner: InnerSolver::default(),
        }
    }
}

impl MmOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_outer == 0 {
            return Err(Error::config("max_outer", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", "must be positive"));
        }
        if let InnerSolver::Supergradient(o) = &self.inner {
            o.validate()?;
        }
        Ok(())
    }
}

/// `slqp(r(p), kq)` of the true rates.
pub fn slqp_of_rates(inst: &NetworkInstance, p: &[f64], kq: usize) -> Result<f64> {
    inst.check_feasible(p)?;
    slqp(&rates_unchecked(inst, p), kq)
}

fn check_kq(inst: &NetworkInstance, kq: usize) -> Result<()> {
    if kq == 0 || kq > inst.users() {
        return Err(Error::PercentileNumberOutOfRange {
            kq,
            len: inst.users(),
        });
    }
    Ok(())
}

/// Maximize `Σ_{kq smallest} w_k · aux_k(x, p)` over the power box, from `start`.
pub(crate) fn inner_update(
    inst: &NetworkInstance,
    transform: Transform,
    x: &[f64],
    weights: Option<&[f64]>,
    kq: usize,
    start: &[f64],
    inner: &InnerSolver,
) -> Result<SolveResult> {
    let terms = AuxTerms {
        inst,
        transform,
        x,
        weights,
    };
    let set = FeasibleSet::power_box(inst.users(), inst.pmax());
    match inner {
        InnerSolver::Barrier(opts) => maximize_sum_smallest(&terms, kq, &set, opts, start),
        InnerSolver::Supergradient(opts) => {
            let n = inst.users();
            let oracle = |p: &[f64]| {
                let vals = terms.values(p);
                if vals.iter().any(|v| !v.is_finite()) {
                    return (f64::NEG_INFINITY, vec![0.0; n]);
                }
                let mask = slqp_supergradient(&vals, kq).expect("kq checked by caller");
                let mut grad = vec![0.0; n];
                let mut g = vec![0.0; n];
                let mut scratch = vec![0.0; n * n];
                // Boundary points give an infinite QFT slope at p_k = 0; nudge inside.
                let inside: Vec<f64> = p.iter().map(|v| v.max(1e-12 * inst.pmax())).collect();
                for k in mask.indices() {
                    terms.eval(k, &inside, &mut g, &mut scratch);
                    for (acc, gi) in grad.iter_mut().zip(&g) {
                        *acc += gi;
                    }
                }
                (mask.dot(&vals), grad)
            };
            maximize_concave(oracle, &set, opts, start)
        }
    }
}

/// Generic cyclic MM loop shared by QFT and LFT.
pub fn run_mm(
    transform: Transform,
    inst: &NetworkInstance,
    kq: usize,
    opts: &MmOptions,
    init: &[f64],
) -> Result<(SolveResult, OuterTrace)> {
    opts.validate()?;
    check_kq(inst, kq)?;
    inst.check_feasible(init)?;
    let set = FeasibleSet::power_box(inst.users(), inst.pmax());

    let mut p = project(&set, init);
    let mut value = slqp_of_rates(inst, &p, kq)?;
    let mut x = x_update(transform, inst, &p)?;
    let mut trace = OuterTrace::default();
    trace.records.push(OuterRecord {
        iter: 0,
        objective: value,
        aux_objective: slqp(&aux_rates(transform, inst, &x, &p), kq)?,
        surrogate: f64::NAN,
        inner_iters: 0,
        time_ms: 0.0,
        inner_converged: true,
    });

    let mut converged = false;
    for iter in 1..=opts.max_outer {
        let started = Instant::now();
        let inner = inner_update(inst, transform, &x.x, None, kq, &p, &opts.inner)?;
        let next = project(&set, &inner.p_star);
        let next_value = slqp_of_rates(inst, &next, kq)?;
        let next_x = x_update(transform, inst, &next)?;
        let aux_objective = slqp(&aux_rates(transform, inst, &next_x, &next), kq)?;

        trace.records.push(OuterRecord {
            iter,
            objective: next_value,
            aux_objective,
            surrogate: inner.value,
            inner_iters: inner.iterations,
            time_ms: started.elapsed().as_secs_f64() * 1e3,
            inner_converged: inner.converged,
        });

        let improvement = next_value - value;
        p = next;
        x = next_x;
        let previous = value;
        value = next_value;
        if improvement < opts.tol * previous.abs().max(1e-12) {
            converged = true;
            break;
        }
    }

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

/// Quadratic-transform MM for the sum of the `kq` smallest rates.
pub fn run_qft(
    inst: &NetworkInstance,
    kq: usize,
    opts: &MmOptions,
    init: &[f64],
) -> Result<(SolveResult, OuterTrace)> {
    run_mm(Transform::Quadratic, inst, kq, opts, init)
}

/// Logarithmic-transform MM for the sum of the `kq` smallest rates.
pub fn run_lft(
    inst: &NetworkInstance,
    kq: usize,
    opts: &MmOptions,
    init: &[f64],
) -> Result<(SolveResult, OuterTrace)> {
    run_mm(Transform::Logarithmic, inst, kq, opts, init)
}
