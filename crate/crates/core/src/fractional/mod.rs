//! Cyclic minorization-maximization for percentile rate maximization.
//!
//! [`run_qft`] and [`run_lft`] alternate a closed-form auxiliary-variable
//! update with a concave power update. Both keep the true objective
//! non-decreasing, since the transformed objective minorizes it and is tight
//! right after each auxiliary update.

mod baselines;
mod diagnostics;
mod mm;
mod parallel;
mod transforms;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baselines::{run_cwsr_baseline, run_random_baseline, run_sga_baseline, run_sum_rate};
pub use diagnostics::{
    directional_stationarity, minorant_tangency_check, sample_feasible_directions, stationarity_check,
    TangencyReport,
};
pub use mm::{run_lft, run_mm, run_qft, slqp_of_rates, InnerSolver, MmOptions};
pub use parallel::{solve_parallel_lqp, solve_parallel_slqp, solve_parallel_slqp_supergradient};
pub use transforms::{
    aux_rates, lft_aux_rate, lft_x_update, qft_aux_rate, qft_x_update, x_update, AuxiliaryState, Transform,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Qft,
    Lft,
    Sga,
    Cwsr,
    Random,
    /// QFT run with `Kq = K`, evaluated at the requested percentile.
    SumRate,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::Qft,
        AlgorithmKind::Lft,
        AlgorithmKind::Sga,
        AlgorithmKind::Cwsr,
        AlgorithmKind::Random,
        AlgorithmKind::SumRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Qft => "qft",
            AlgorithmKind::Lft => "lft",
            AlgorithmKind::Sga => "sga",
            AlgorithmKind::Cwsr => "cwsr",
            AlgorithmKind::Random => "random",
            AlgorithmKind::SumRate => "sumrate",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        AlgorithmKind::ALL
            .into_iter()
            .find(|a| a.name() == lower || (lower == "sum-rate" && *a == AlgorithmKind::SumRate))
            .ok_or_else(|| Error::config("algorithms", format!("unknown algorithm `{s}`")))
    }
}

/// One outer iteration of an alternating algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub iter: usize,
    /// Percentile objective of the true rates at this iterate.
    pub objective: f64,
    /// Transformed objective right after the auxiliary update at this iterate.
    pub aux_objective: f64,
    /// Transformed objective reached by the power update, with the previous
    /// auxiliary variables; `NaN` on the initial record.
    pub surrogate: f64,
    pub inner_iters: usize,
    pub time_ms: f64,
    pub inner_converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OuterTrace {
    pub records: Vec<OuterRecord>,
}

impl OuterTrace {
    pub const CSV_HEADER: &'static str = "iter,objective_nats,aux_objective_nats,inner_iters,time_ms";

    /// Number of power updates performed (records after the initial one).
    pub fn outer_iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// True if some inner solve hit its iteration cap.
    pub fn inner_warning(&self) -> bool {
        self.records.iter().any(|r| !r.inner_converged)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{:.3}",
                r.iter, r.objective, r.aux_objective, r.inner_iters, r.time_ms
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in AlgorithmKind::ALL {
            assert_eq!(a.name().parse::<AlgorithmKind>().unwrap(), a);
        }
        assert_eq!("QFT".parse::<AlgorithmKind>().unwrap(), AlgorithmKind::Qft);
        assert!("sca".parse::<AlgorithmKind>().is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let trace = OuterTrace {
            records: vec![OuterRecord {
                iter: 0,
                objective: 1.5,
                aux_objective: 1.5,
                surrogate: f64::NAN,
                inner_iters: 0,
                time_ms: 0.0,
                inner_converged: true,
            }],
        };
        let csv = trace.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), OuterTrace::CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "0,1.5,1.5,0,0.000");
        assert_eq!(trace.outer_iterations(), 0);
    }
}
