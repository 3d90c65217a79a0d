//! Percentile rate maximization over parallel Gaussian channels, where the
//! objective is concave in the powers and can be solved to global optimality.

use crate::error::{Error, Result};
use crate::network::{parallel_rates, ParallelChannelInstance};
use crate::percentile::{slqp, slqp_supergradient};
use crate::solver::{
    maximize_concave, maximize_sum_smallest, BarrierOptions, ConcaveTerms, FeasibleSet, SolveResult,
    SolverOptions,
};

/// `φ_k(p) = ln(1 + p_k / z_k)`.
struct ParallelTerms<'a> {
    z: &'a [f64],
}

impl ConcaveTerms for ParallelTerms<'_> {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn terms(&self) -> usize {
        self.z.len()
    }

    fn value(&self, k: usize, p: &[f64]) -> f64 {
        let arg = self.z[k] + p[k];
        if arg > 0.0 {
            (arg / self.z[k]).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn eval(&self, k: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let n = self.z.len();
        grad.fill(0.0);
        let arg = self.z[k] + p[k];
        grad[k] = 1.0 / arg;
        hess[k * n + k] -= 1.0 / (arg * arg);
        self.value(k, p)
    }
}

fn check_kq(inst: &ParallelChannelInstance, kq: usize) -> Result<()> {
    if kq == 0 || kq > inst.users() {
        return Err(Error::PercentileNumberOutOfRange {
            kq,
            len: inst.users(),
        });
    }
    Ok(())
}

fn uniform_start(inst: &ParallelChannelInstance) -> Vec<f64> {
    vec![inst.p_total() / inst.users() as f64; inst.users()]
}

/// Globally optimal powers for the sum of the `kq` smallest parallel-channel
/// rates under the total-power budget. Powers follow the instance's stored
/// (descending-noise) user order.
pub fn solve_parallel_slqp(inst: &ParallelChannelInstance, kq: usize, opts: &BarrierOptions) -> Result<SolveResult> {
    check_kq(inst, kq)?;
    let set = FeasibleSet::simplex_cap(inst.p_total())?;
    let terms = ParallelTerms { z: inst.noise() };
    let mut res = maximize_sum_smallest(&terms, kq, &set, opts, &uniform_start(inst))?;
    res.value = slqp(&parallel_rates(inst, &res.p_star)?, kq)?;
    Ok(res)
}

/// Same problem solved by projected supergradient ascent.
pub fn solve_parallel_slqp_supergradient(
    inst: &ParallelChannelInstance,
    kq: usize,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    check_kq(inst, kq)?;
    let set = FeasibleSet::simplex_cap(inst.p_total())?;
    let z = inst.noise();
    let oracle = |p: &[f64]| {
        let r: Vec<f64> = p.iter().zip(z).map(|(p, z)| (p.max(0.0) / z).ln_1p()).collect();
        let mask = slqp_supergradient(&r, kq).expect("kq checked above");
        let grad = (0..z.len())
            .map(|k| if mask.is_selected(k) { 1.0 / (z[k] + p[k]) } else { 0.0 })
            .collect();
        (mask.dot(&r), grad)
    };
    maximize_concave(oracle, &set, opts, &uniform_start(inst))
}

/// Maximize the `kq`-th smallest rate: the `kq − 1` noisiest users are switched
/// off and the rest share the budget at equal rate. `value` is that rate.
pub fn solve_parallel_lqp(inst: &ParallelChannelInstance, kq: usize) -> Result<SolveResult> {
    check_kq(inst, kq)?;
    let z = inst.noise();
    let served: f64 = z[kq - 1..].iter().sum();
    let rate = (inst.p_total() / served).ln_1p();
    let gain = rate.exp_m1();
    let p_star: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(k, zk)| if k + 1 < kq { 0.0 } else { zk * gain })
        .collect();
    Ok(SolveResult {
        p_star,
        value: rate,
        iterations: 0,
        trace: vec![rate],
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::water_fill;

    fn sum_rate(p: &[f64], z: &[f64]) -> f64 {
        p.iter().zip(z).map(|(p, z)| (p / z).ln_1p()).sum()
    }

    #[test]
    fn max_min_closed_form() {
        let inst = ParallelChannelInstance::new(vec![1.0, 3.0, 0.5, 2.0], 5.0).unwrap();
        let res = solve_parallel_slqp(&inst, 1, &BarrierOptions::default()).unwrap();
        let expected = (5.0f64 / 6.5).ln_1p();
        assert!((res.value - expected).abs() < 1e-8);
    }

    #[test]
    fn full_percentile_is_water_filling() {
        let inst = ParallelChannelInstance::new(vec![0.2, 1.0, 0.7, 2.5, 0.05], 1.5).unwrap();
        let res = solve_parallel_slqp(&inst, 5, &BarrierOptions::default()).unwrap();
        let wf = water_fill(inst.noise(), 1.5).unwrap();
        let best = sum_rate(&wf, inst.noise());
        assert!((res.value - best).abs() < 1e-8 * best);
    }

    #[test]
    fn supergradient_variant_agrees() {
        let inst = ParallelChannelInstance::new(vec![0.3, 1.0, 0.6, 2.0], 2.0).unwrap();
        for kq in 1..=4 {
            let a = solve_parallel_slqp(&inst, kq, &BarrierOptions::default()).unwrap();
            let b = solve_parallel_slqp_supergradient(&inst, kq, &SolverOptions::default()).unwrap();
            assert!(b.value <= a.value + 1e-9);
            assert!(a.value - b.value < 1e-2 * a.value, "kq {kq}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn lqp_worked_example() {
        let inst = ParallelChannelInstance::new(vec![4.0, 2.0, 1.0], 3.0).unwrap();
        let res = solve_parallel_lqp(&inst, 2).unwrap();
        assert_eq!(res.p_star.len(), 3);
        assert!((res.p_star[0]).abs() < 1e-15);
        assert!((res.p_star[1] - 2.0).abs() < 1e-12);
        assert!((res.p_star[2] - 1.0).abs() < 1e-12);
        assert!((res.value - 2f64.ln()).abs() < 1e-12);
        assert!((res.p_star.iter().sum::<f64>() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lqp_with_first_percentile_is_max_min() {
        let inst = ParallelChannelInstance::new(vec![0.4, 1.1, 3.0], 2.0).unwrap();
        let lqp = solve_parallel_lqp(&inst, 1).unwrap();
        let slqp = solve_parallel_slqp(&inst, 1, &BarrierOptions::default()).unwrap();
        assert!((lqp.value - slqp.value).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_percentile() {
        let inst = ParallelChannelInstance::new(vec![1.0, 2.0], 1.0).unwrap();
        assert!(solve_parallel_slqp(&inst, 0, &BarrierOptions::default()).is_err());
        assert!(solve_parallel_lqp(&inst, 3).is_err());
    }
}
