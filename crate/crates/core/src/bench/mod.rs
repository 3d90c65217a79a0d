//! Seeded Monte-Carlo experiments on the cellular model.
//!
//! Every `(seed, pmax)` cell draws one network and one initial power vector
//! and runs every configured algorithm on that same pair, so comparisons are
//! paired. Output is deterministic for a given config unless timing is on.

mod config;
mod plot;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, InitKind, CONFIG_KEYS};
pub use plot::{emit_plot_data, svg_line_chart, PlotKind, Series};
pub use verify::{verify, Check, Suite, VerifyReport};

use crate::error::{Error, Result};
use crate::fractional::{
    run_cwsr_baseline, run_lft, run_qft, run_sga_baseline, run_sum_rate, slqp_of_rates, AlgorithmKind, MmOptions,
    OuterTrace,
};
use crate::network::{dbm_to_watts, generate_cellular, random_powers, NetworkConfig, NetworkInstance};
use crate::solver::SolverOptions;

pub const RESULTS_HEADER: &str = "seed,algorithm,pmax_dbm,final_slqp_nats,outer_iters,wall_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub seed: u64,
    pub algorithm: AlgorithmKind,
    pub pmax_dbm: f64,
    pub final_slqp_nats: f64,
    pub outer_iters: usize,
    pub wall_ms: f64,
}

/// Per-row record of which instance a result was computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub seed: u64,
    pub algorithm: AlgorithmKind,
    pub pmax_dbm: f64,
    pub instance_sha256: String,
    pub error: String,
}

/// What one algorithm produced on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmOutcome {
    pub p: Vec<f64>,
    pub value: f64,
    pub outer_iters: usize,
    pub trace: Option<OuterTrace>,
}

/// Run one algorithm on one instance from `init`.
pub fn run_algorithm(
    kind: AlgorithmKind,
    inst: &NetworkInstance,
    kq: usize,
    init: &[f64],
    opts: &MmOptions,
) -> Result<AlgorithmOutcome> {
    let from_mm = |(res, trace): (crate::solver::SolveResult, OuterTrace)| AlgorithmOutcome {
        outer_iters: trace.outer_iterations(),
        p: res.p_star,
        value: res.value,
        trace: Some(trace),
    };
    Ok(match kind {
        AlgorithmKind::Qft => from_mm(run_qft(inst, kq, opts, init)?),
        AlgorithmKind::Lft => from_mm(run_lft(inst, kq, opts, init)?),
        AlgorithmKind::Cwsr => from_mm(run_cwsr_baseline(inst, kq, opts, init)?),
        AlgorithmKind::SumRate => from_mm(run_sum_rate(inst, kq, opts, init)?),
        AlgorithmKind::Sga => {
            let res = run_sga_baseline(inst, kq, &SolverOptions::default(), init)?;
            AlgorithmOutcome {
                outer_iters: res.iterations,
                p: res.p_star,
                value: res.value,
                trace: None,
            }
        }
        AlgorithmKind::Random => AlgorithmOutcome {
            value: slqp_of_rates(inst, init, kq)?,
            p: init.to_vec(),
            outer_iters: 0,
            trace: None,
        },
    })
}

/// Seed of the initial power vector for realization `seed` at pmax level `level`.
pub fn init_seed(seed: u64, level: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(level as u64 + 1)
}

fn initial_powers(cfg: &ExperimentConfig, users: usize, pmax: f64, seed: u64, level: usize) -> Vec<f64> {
    match cfg.init {
        InitKind::Random => random_powers(users, pmax, init_seed(seed, level)),
        InitKind::Full => vec![pmax; users],
    }
}

/// In-memory result of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub rows: Vec<ResultRow>,
    pub instances: Vec<InstanceRow>,
}

impl Experiment {
    pub fn failures(&self) -> impl Iterator<Item = &InstanceRow> {
        self.instances.iter().filter(|r| !r.error.is_empty())
    }

    /// Final values of one algorithm at one pmax level, in seed order.
    pub fn values(&self, algorithm: AlgorithmKind, pmax_dbm: f64) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.pmax_dbm == pmax_dbm)
            .map(|r| r.final_slqp_nats)
            .collect()
    }

    pub fn write_results(&self, path: impl AsRef<Path>) -> Result<()> {
        write_csv(path, &self.rows)
    }

    pub fn write_instances(&self, path: impl AsRef<Path>) -> Result<()> {
        write_csv(path, &self.instances)
    }
}

fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Read a results CSV written by [`run_experiment`].
pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != RESULTS_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{RESULTS_HEADER}`, got `{header}`"),
        });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Run every `(seed, pmax, algorithm)` cell of the config in memory.
pub fn run_cells(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let kq = cfg.kq()?;
    let levels = cfg.pmax_levels_dbm();
    let opts = MmOptions {
        max_outer: cfg.max_outer,
        tol: cfg.tol,
        ..Default::default()
    };

    let per_seed: Vec<Vec<(ResultRow, InstanceRow)>> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let net = NetworkConfig {
                seed,
                ..cfg.network.clone()
            };
            let base = generate_cellular(&net);
            let mut out = Vec::new();
            for (level, &dbm) in levels.iter().enumerate() {
                let inst = base.as_ref().map_err(|e| e.to_string()).and_then(|b| {
                    b.with_pmax(dbm_to_watts(dbm)).map_err(|e| e.to_string())
                });
                let hash = inst.as_ref().map(|i| i.fingerprint()).unwrap_or_default();
                for &algorithm in &cfg.algorithms {
                    let started = Instant::now();
                    let outcome = inst.as_ref().map_err(Clone::clone).and_then(|inst| {
                        let init = initial_powers(cfg, inst.users(), inst.pmax(), seed, level);
                        run_algorithm(algorithm, inst, kq, &init, &opts).map_err(|e| e.to_string())
                    });
                    let wall_ms = if cfg.timing {
                        (started.elapsed().as_secs_f64() * 1e6).round() / 1e3
                    } else {
                        0.0
                    };
                    let (value, iters, error) = match outcome {
                        Ok(o) => (o.value, o.outer_iters, String::new()),
                        Err(e) => (f64::NAN, 0, e),
                    };
                    out.push((
                        ResultRow {
                            seed,
                            algorithm,
                            pmax_dbm: dbm,
                            final_slqp_nats: value,
                            outer_iters: iters,
                            wall_ms,
                        },
                        InstanceRow {
                            seed,
                            algorithm,
                            pmax_dbm: dbm,
                            instance_sha256: hash.clone(),
                            error,
                        },
                    ));
                }
            }
            out
        })
        .collect();

    let (rows, instances) = per_seed.into_iter().flatten().unzip();
    Ok(Experiment { rows, instances })
}

/// Paths written by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub results: PathBuf,
    pub instances: PathBuf,
    pub experiment: Experiment,
}

/// Run the experiment and write `results.csv` and `instances.csv` under the
/// config's output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let experiment = run_cells(cfg)?;
    fs::create_dir_all(&cfg.output_dir)?;
    let results = cfg.output_dir.join("results.csv");
    let instances = cfg.output_dir.join("instances.csv");
    experiment.write_results(&results)?;
    experiment.write_instances(&instances)?;
    Ok(ExperimentOutput {
        results,
        instances,
        experiment,
    })
}

/// Mean final value per algorithm (rows) and pmax level (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub pmax_dbm: Vec<f64>,
    pub algorithms: Vec<AlgorithmKind>,
    /// `means[a][j]`: mean over realizations, skipping failed cells.
    pub means: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn from_rows(rows: &[ResultRow]) -> Self {
        let mut pmax_dbm: Vec<f64> = Vec::new();
        let mut algorithms: Vec<AlgorithmKind> = Vec::new();
        for r in rows {
            if !pmax_dbm.contains(&r.pmax_dbm) {
                pmax_dbm.push(r.pmax_dbm);
            }
            if !algorithms.contains(&r.algorithm) {
                algorithms.push(r.algorithm);
            }
        }
        pmax_dbm.sort_by(f64::total_cmp);
        let means = algorithms
            .iter()
            .map(|&a| {
                pmax_dbm
                    .iter()
                    .map(|&p| {
                        let vals: Vec<f64> = rows
                            .iter()
                            .filter(|r| r.algorithm == a && r.pmax_dbm == p && r.final_slqp_nats.is_finite())
                            .map(|r| r.final_slqp_nats)
                            .collect();
                        if vals.is_empty() {
                            f64::NAN
                        } else {
                            vals.iter().sum::<f64>() / vals.len() as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            pmax_dbm,
            algorithms,
            means,
        }
    }

    pub fn mean(&self, algorithm: AlgorithmKind) -> Option<&[f64]> {
        self.algorithms
            .iter()
            .position(|a| *a == algorithm)
            .map(|i| self.means[i].as_slice())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("algorithm");
        for p in &self.pmax_dbm {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
        for (a, row) in self.algorithms.iter().zip(&self.means) {
            out.push_str(a.name());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Run the pmax sweep and write `results.csv`, `instances.csv` and
/// `sweep.csv` (mean final value, one row per algorithm, one column per level).
pub fn sweep_pmax(cfg: &ExperimentConfig) -> Result<(PathBuf, SweepTable)> {
    if cfg.pmax_sweep_dbm.is_none() {
        return Err(Error::config("pmax_sweep_dbm", "required for a sweep"));
    }
    let out = run_experiment(cfg)?;
    let table = SweepTable::from_rows(&out.experiment.rows);
    let path = cfg.output_dir.join("sweep.csv");
    fs::write(&path, table.to_csv_string())?;
    Ok((path, table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            network: NetworkConfig {
                users_per_cell: 1,
                ..Default::default()
            },
            q: 50.0,
            algorithms: vec![AlgorithmKind::Qft, AlgorithmKind::Random],
            realizations: 2,
            output_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn two_seeds_two_algorithms_give_four_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&tiny(dir.path())).unwrap();
        assert_eq!(out.experiment.rows.len(), 4);
        let text = fs::read_to_string(&out.results).unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULTS_HEADER);
        assert_eq!(read_results(&out.results).unwrap(), out.experiment.rows);
        let hashes: Vec<&str> = out.experiment.instances.iter().map(|r| r.instance_sha256.as_str()).collect();
        assert_eq!(hashes[0], hashes[1]);
        assert_ne!(hashes[1], hashes[2]);
    }

    #[test]
    fn sweep_table_layout() {
        let rows = vec![
            ResultRow {
                seed: 0,
                algorithm: AlgorithmKind::Qft,
                pmax_dbm: 20.0,
                final_slqp_nats: 1.0,
                outer_iters: 3,
                wall_ms: 0.0,
            },
            ResultRow {
                seed: 1,
                algorithm: AlgorithmKind::Qft,
                pmax_dbm: 20.0,
                final_slqp_nats: 2.0,
                outer_iters: 3,
                wall_ms: 0.0,
            },
        ];
        let t = SweepTable::from_rows(&rows);
        assert_eq!(t.to_csv_string(), "algorithm,20\nqft,1.5\n");
    }

    #[test]
    fn sweep_requires_levels() {
        let dir = tempfile::tempdir().unwrap();
        assert!(sweep_pmax(&tiny(dir.path())).is_err());
    }
}
