use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::AlgorithmKind;
use crate::network::NetworkConfig;
use crate::percentile::percentile_number;

/// How the shared initial power vector of each cell is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitKind {
    /// Uniform in `[0, pmax]` per user, seeded.
    Random,
    /// Every user at `pmax`.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub q: f64,
    pub algorithms: Vec<AlgorithmKind>,
    pub realizations: usize,
    /// Realization `i` uses network seed `seed + i`.
    pub seed: u64,
    pub pmax_sweep_dbm: Option<Vec<f64>>,
    pub output_dir: PathBuf,
    pub max_outer: usize,
    pub tol: f64,
    pub init: InitKind,
    /// Record wall-clock times; off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            network: NetworkConfig::default(),
            q: 10.0,
            algorithms: vec![
                AlgorithmKind::Qft,
                AlgorithmKind::Lft,
                AlgorithmKind::Sga,
                AlgorithmKind::Cwsr,
                AlgorithmKind::Random,
            ],
            realizations: 50,
            seed: 0,
            pmax_sweep_dbm: None,
            output_dir: PathBuf::from("results"),
            max_outer: 100,
            tol: 1e-6,
            init: InitKind::Random,
            timing: false,
        }
    }
}

/// Keys accepted in a config file.
pub const CONFIG_KEYS: &[&str] = &[
    "cells",
    "users_per_cell",
    "isd_m",
    "d0_m",
    "zeta",
    "noise_psd_dbm_hz",
    "bandwidth_hz",
    "pmax_dbm",
    "q",
    "algorithms",
    "realizations",
    "seed",
    "pmax_sweep_dbm",
    "output_dir",
    "max_outer",
    "tol",
    "init",
    "timing",
];

impl ExperimentConfig {
    pub fn users(&self) -> usize {
        self.network.users()
    }

    pub fn kq(&self) -> Result<usize> {
        percentile_number(self.users(), self.q)
    }

    /// The pmax levels to run: the sweep if present, else the network's pmax.
    pub fn pmax_levels_dbm(&self) -> Vec<f64> {
        self.pmax_sweep_dbm.clone().unwrap_or_else(|| vec![self.network.pmax_dbm])
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if !(self.q > 0.0 && self.q <= 100.0) {
            return Err(Error::config("q", format!("must lie in (0, 100], got {}", self.q)));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "list at least one algorithm"));
        }
        if self.realizations == 0 {
            return Err(Error::config("realizations", "must be at least 1"));
        }
        if self.max_outer == 0 {
            return Err(Error::config("max_outer", "must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::config("tol", "must be positive"));
        }
        if let Some(levels) = &self.pmax_sweep_dbm {
            if levels.is_empty() {
                return Err(Error::config("pmax_sweep_dbm", "list at least one level"));
            }
            if levels.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("pmax_sweep_dbm", "levels must be finite"));
            }
        }
        Ok(())
    }

    /// Parse flat `key = value` lines; `#` and `;` start comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Set one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let net = &mut self.network;
        match key {
            "cells" => net.cells = parse_num(key, value)?,
            "users_per_cell" => net.users_per_cell = parse_num(key, value)?,
            "isd_m" => net.isd_m = parse_num(key, value)?,
            "d0_m" => net.d0_m = parse_num(key, value)?,
            "zeta" => net.zeta = parse_num(key, value)?,
            "noise_psd_dbm_hz" => net.noise_psd_dbm_hz = parse_num(key, value)?,
            "bandwidth_hz" => net.bandwidth_hz = parse_num(key, value)?,
            "pmax_dbm" => net.pmax_dbm = parse_num(key, value)?,
            "q" => self.q = parse_num(key, value)?,
            "algorithms" => {
                self.algorithms = split_list(value)
                    .map(|s| s.parse())
                    .collect::<Result<Vec<AlgorithmKind>>>()?;
            }
            "realizations" => self.realizations = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "pmax_sweep_dbm" => {
                let levels = split_list(value)
                    .map(|s| parse_num(key, s))
                    .collect::<Result<Vec<f64>>>()?;
                self.pmax_sweep_dbm = if levels.is_empty() { None } else { Some(levels) };
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "max_outer" => self.max_outer = parse_num(key, value)?,
            "tol" => self.tol = parse_num(key, value)?,
            "init" => {
                self.init = match value.to_ascii_lowercase().as_str() {
                    "random" => InitKind::Random,
                    "full" | "pmax" => InitKind::Full,
                    _ => return Err(Error::config(key, format!("expected `random` or `full`, got `{value}`"))),
                }
            }
            "timing" => {
                self.timing = match value.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" | "on" => true,
                    "false" | "no" | "0" | "off" => false,
                    _ => return Err(Error::config(key, format!("expected a boolean, got `{value}`"))),
                }
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}
