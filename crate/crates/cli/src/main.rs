use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use slqp_core::bench::{
    emit_plot_data, run_algorithm, run_experiment, sweep_pmax, verify, ExperimentConfig, PlotKind, Suite,
};
use slqp_core::error::Error;
use slqp_core::fractional::{AlgorithmKind, MmOptions};
use slqp_core::hardness::{build_instance, ComponentGraph};
use slqp_core::network::{generate_cellular, random_powers, rates, NetworkConfig, NetworkInstance};
use slqp_core::percentile::percentile_number;

#[derive(Parser)]
#[command(name = "slqp", version, about = "Percentile rate power control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a network instance and write it as JSON.
    Generate {
        /// Take network parameters from this config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Build the reduction instance of an edge-list graph instead.
        #[arg(long, conflicts_with = "config")]
        graph: Option<PathBuf>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        users_per_cell: Option<usize>,
        #[arg(long)]
        pmax_dbm: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on a JSON instance.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        q: f64,
        #[arg(long, default_value = "qft")]
        algo: AlgorithmKind,
        /// Seed of the random initial powers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_outer: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the outer-iteration trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the Monte-Carlo experiment described by a config file.
    Bench {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the pmax sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Turn a trace or results CSV into .dat files and an SVG chart.
    Plot {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotArg,
        #[arg(long, default_value = "plots")]
        out_dir: PathBuf,
    },
    /// Run a self-check suite, or all of them.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotArg {
    Convergence,
    Sweep,
}

#[derive(Serialize)]
struct SolveOutput {
    algorithm: AlgorithmKind,
    users: usize,
    kq: usize,
    value_nats: f64,
    outer_iters: usize,
    powers: Vec<f64>,
    rates_nats: Vec<f64>,
}

enum Failure {
    Validation(Error),
    Suite,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e)
    }
}

fn load_config(path: &PathBuf, output_dir: Option<PathBuf>) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            config,
            graph,
            cells,
            users_per_cell,
            pmax_dbm,
            seed,
            out,
        } => {
            let inst = if let Some(graph) = graph {
                build_instance(&ComponentGraph::load(graph)?)?
            } else {
                let mut net = match config {
                    Some(path) => ExperimentConfig::load(path)?.network,
                    None => NetworkConfig::default(),
                };
                net.cells = cells.unwrap_or(net.cells);
                net.users_per_cell = users_per_cell.unwrap_or(net.users_per_cell);
                net.pmax_dbm = pmax_dbm.unwrap_or(net.pmax_dbm);
                net.seed = seed;
                generate_cellular(&net)?
            };
            match out {
                Some(path) => inst.save(path)?,
                None => println!("{}", inst.to_json()?),
            }
        }
        Command::Solve {
            instance,
            q,
            algo,
            seed,
            max_outer,
            tol,
            trace,
        } => {
            let inst = NetworkInstance::load(instance)?;
            let kq = percentile_number(inst.users(), q)?;
            let opts = MmOptions {
                max_outer,
                tol,
                ..Default::default()
            };
            opts.validate()?;
            let init = random_powers(inst.users(), inst.pmax(), seed);
            let outcome = run_algorithm(algo, &inst, kq, &init, &opts)?;
            if let (Some(path), Some(t)) = (trace, &outcome.trace) {
                std::fs::write(path, t.to_csv_string()).map_err(Error::from)?;
            }
            let out = SolveOutput {
                algorithm: algo,
                users: inst.users(),
                kq,
                value_nats: outcome.value,
                outer_iters: outcome.outer_iters,
                rates_nats: rates(&inst, &outcome.p)?,
                powers: outcome.p,
            };
            println!("{}", serde_json::to_string_pretty(&out).map_err(Error::from)?);
        }
        Command::Bench { config, output_dir } => {
            let out = run_experiment(&load_config(&config, output_dir)?)?;
            let failed = out.experiment.failures().count();
            println!("wrote {} rows to {}", out.experiment.rows.len(), out.results.display());
            if failed > 0 {
                eprintln!("{failed} cells failed; see {}", out.instances.display());
            }
        }
        Command::Sweep { config, output_dir } => {
            let (path, table) = sweep_pmax(&load_config(&config, output_dir)?)?;
            print!("{}", table.to_csv_string());
            println!("wrote {}", path.display());
        }
        Command::Plot { input, kind, out_dir } => {
            let kind = match kind {
                PlotArg::Convergence => PlotKind::Convergence,
                PlotArg::Sweep => PlotKind::Sweep,
            };
            for path in emit_plot_data(input, kind, out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Verify { suite } => {
            let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse()?]
            };
            let mut ok = true;
            for s in suites {
                let report = verify(s)?;
                println!("{report}");
                ok &= report.passed();
            }
            if !ok {
                return Err(Failure::Suite);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Suite) => ExitCode::from(2),
    }
}
