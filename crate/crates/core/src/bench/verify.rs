//! Fixed-seed self-checks that report each invariant with its measured residual.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::{
    minorant_tangency_check, run_lft, run_qft, solve_parallel_lqp, solve_parallel_slqp, stationarity_check,
    MmOptions, Transform,
};
use crate::hardness::{brute_force_binary_optimum, build_instance, expected_optimum, Canonical, ComponentGraph};
use crate::network::{generate_cellular, random_powers, NetworkConfig, ParallelChannelInstance};
use crate::percentile::{sgqp, slqp, slqp_supergradient};
use crate::solver::{water_fill, BarrierOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Properties,
    Oracles,
    Hardness,
    Diagnostics,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Properties, Suite::Oracles, Suite::Hardness, Suite::Diagnostics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Properties => "properties",
            Suite::Oracles => "oracles",
            Suite::Hardness => "hardness",
            Suite::Diagnostics => "diagnostics",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::config("suite", format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            bound,
            passed: residual <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {:<40} residual {:.3e} (bound {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.bound
            )?;
        }
        write!(f, "{}", if self.passed() { "all passed" } else { "FAILED" })
    }
}

/// Run one suite with fixed seeds.
pub fn verify(suite: Suite) -> Result<VerifyReport> {
    let checks = match suite {
        Suite::Properties => properties()?,
        Suite::Oracles => oracles()?,
        Suite::Hardness => hardness()?,
        Suite::Diagnostics => diagnostics()?,
    };
    Ok(VerifyReport { suite, checks })
}

fn properties() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = [0.0f64; 7];
    for _ in 0..10_000 {
        let k = rng.random_range(2..=16);
        let kq = rng.random_range(1..=k);
        let x: Vec<f64> = (0..k).map(|_| rng.random_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..k).map(|_| rng.random_range(-10.0..10.0)).collect();
        let scale = 1.0 + x.iter().chain(&y).map(|v| v.abs()).sum::<f64>();
        let f = |v: &[f64]| slqp(v, kq).expect("kq in range");
        let big = |v: &[f64]| sgqp(v, kq).expect("kq in range");
        let total: f64 = x.iter().sum();

        // Sum of the kq smallest plus the k − kq largest is the total.
        let rest = if kq < k { sgqp(&x, k - kq)? } else { 0.0 };
        worst[0] = worst[0].max((f(&x) + rest - total).abs() / scale);

        let t: f64 = rng.random();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        worst[1] = worst[1].max((t * f(&x) + (1.0 - t) * f(&y) - f(&mid)) / scale);
        worst[1] = worst[1].max((big(&mid) - t * big(&x) - (1.0 - t) * big(&y)) / scale);

        let up: Vec<f64> = x.iter().map(|v| v + rng.random_range(0.0..1.0)).collect();
        worst[2] = worst[2].max((f(&x) - f(&up)) / scale);

        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        worst[3] = worst[3].max((big(&x) + f(&neg)).abs() / scale);

        worst[4] = worst[4].max((f(&x) - big(&x)) / scale);

        let mut perm = x.clone();
        perm.reverse();
        perm.rotate_left(rng.random_range(0..k));
        worst[5] = worst[5].max((f(&x) - f(&perm)).abs() / scale);

        let mask = slqp_supergradient(&x, kq)?;
        worst[6] = worst[6].max((f(&y) - f(&x) - mask.dot(&y) + mask.dot(&x)) / scale);
    }
    let names = [
        "decomposition identity",
        "concavity and convexity",
        "monotonicity",
        "symmetry",
        "ordering",
        "permutation invariance",
        "supergradient inequality",
    ];
    Ok(names.iter().zip(worst).map(|(n, w)| Check::new(*n, w.max(0.0), 1e-9)).collect())
}

fn oracles() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x04ac1e);
    let opts = BarrierOptions::default();
    let (mut wf_gap, mut mm_gap, mut lqp_gap) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let k = rng.random_range(2..=10);
        let z: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..5.0)).collect();
        let p_total = rng.random_range(0.5..20.0);
        let inst = ParallelChannelInstance::new(z, p_total)?;

        let full = solve_parallel_slqp(&inst, k, &opts)?.value;
        let wf: f64 = water_fill(inst.noise(), p_total)?
            .iter()
            .zip(inst.noise())
            .map(|(p, z)| (p / z).ln_1p())
            .sum();
        wf_gap = wf_gap.max((full - wf).abs() / wf);

        let min = solve_parallel_slqp(&inst, 1, &opts)?.value;
        let closed = (p_total / inst.noise().iter().sum::<f64>()).ln_1p();
        mm_gap = mm_gap.max((min - closed).abs() / closed);

        lqp_gap = lqp_gap.max((solve_parallel_lqp(&inst, 1)?.value - closed).abs() / closed);
    }
    Ok(vec![
        Check::new("full percentile matches water-filling", wf_gap, 1e-3),
        Check::new("first percentile matches max-min", mm_gap, 1e-3),
        Check::new("percentile rate matches max-min", lqp_gap, 1e-9),
    ])
}

fn hardness() -> Result<Vec<Check>> {
    let cases = [
        (Canonical::Path, 2, 2),
        (Canonical::Path, 3, 5),
        (Canonical::Cycle, 2, 5),
        (Canonical::Cycle, 1, 6),
        (Canonical::Clique, 3, 4),
        (Canonical::Star, 2, 5),
    ];
    let mut worst = 0.0f64;
    for (kind, isolated, kq) in cases {
        let graph = ComponentGraph::canonical(kind, isolated, kq, kq as f64 + 1.5)?;
        let inst = build_instance(&graph)?;
        let (_, best) = brute_force_binary_optimum(&inst, graph.kq())?;
        worst = worst.max((best - expected_optimum(&graph)?).abs());
    }
    Ok(vec![Check::new("brute force equals |I|·ln(1 + 1/L)", worst, 1e-9)])
}

fn diagnostics() -> Result<Vec<Check>> {
    let opts = MmOptions::default();
    let (h, dirs) = (1e-4, 100);
    let mut stationarity = f64::NEG_INFINITY;
    let (mut equality, mut tangency, mut minorization) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for seed in 0..4 {
        let inst = generate_cellular(&NetworkConfig {
            users_per_cell: 2,
            seed,
            ..Default::default()
        })?;
        let kq = 7;
        let init = random_powers(inst.users(), inst.pmax(), seed + 1000);
        for transform in [Transform::Quadratic, Transform::Logarithmic] {
            let p = match transform {
                Transform::Quadratic => run_qft(&inst, kq, &opts, &init)?.0.p_star,
                Transform::Logarithmic => run_lft(&inst, kq, &opts, &init)?.0.p_star,
            };
            stationarity = stationarity.max(stationarity_check(&inst, kq, &p, dirs, h, seed)?);
            let r = minorant_tangency_check(&inst, kq, transform, &p, dirs, h, seed)?;
            equality = equality.max(r.equality_gap);
            minorization = minorization.max(r.minorization_violation);
            // Near p_k = 0 the quadratic surrogate is not smooth at scale h.
            let smooth = p.iter().all(|&v| v >= h.sqrt() * inst.pmax());
            if transform == Transform::Logarithmic || smooth {
                tangency = tangency.max(r.tangency_residual);
            }
        }
    }
    Ok(vec![
        Check::new("stationarity quotient at outputs", stationarity.max(0.0), 1e-2),
        Check::new("surrogate equals objective at p", equality, 1e-12),
        Check::new("surrogate tangent at smooth p", tangency, 10.0 * h),
        Check::new("surrogate minorizes objective", minorization.max(0.0), 1e-9),
    ])
}
