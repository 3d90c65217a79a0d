//! Interference networks and parallel Gaussian channels.
//!
//! Gains are stored as power gains `G[j][k] = |h_{j→k}|²` in a row-major
//! `K × K` buffer: row `j` is the transmitter, column `k` the receiver.
//! Rates are in nats.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Slack allowed when checking `0 ≤ p ≤ pmax` and `Σp ≤ P`.
const FEASIBILITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceDoc", into = "InstanceDoc")]
pub struct NetworkInstance {
    users: usize,
    gains: Vec<f64>,
    sigma2: f64,
    pmax: f64,
}

/// On-disk JSON layout: `{"K": .., "G": [row-major], "sigma2": .., "pmax": ..}`.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "G")]
    g: Vec<f64>,
    sigma2: f64,
    pmax: f64,
}

impl TryFrom<InstanceDoc> for NetworkInstance {
    type Error = Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        NetworkInstance::new(doc.k, doc.g, doc.sigma2, doc.pmax)
    }
}

impl From<NetworkInstance> for InstanceDoc {
    fn from(inst: NetworkInstance) -> Self {
        InstanceDoc {
            k: inst.users,
            g: inst.gains,
            sigma2: inst.sigma2,
            pmax: inst.pmax,
        }
    }
}

impl NetworkInstance {
    pub fn new(users: usize, gains: Vec<f64>, sigma2: f64, pmax: f64) -> Result<Self> {
        if users == 0 {
            return Err(Error::EmptyNetwork);
        }
        if gains.len() != users * users {
            return Err(Error::DimensionMismatch {
                expected: users * users,
                got: gains.len(),
            });
        }
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidInstance("gains must be finite and non-negative".into()));
        }
        if (0..users).any(|k| gains[k * users + k] <= 0.0) {
            return Err(Error::InvalidInstance("direct gains must be positive".into()));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidInstance(format!("sigma2 = {sigma2} must be positive")));
        }
        if !(pmax > 0.0 && pmax.is_finite()) {
            return Err(Error::InvalidInstance(format!("pmax = {pmax} must be positive")));
        }
        Ok(Self {
            users,
            gains,
            sigma2,
            pmax,
        })
    }

    /// Build from nested rows `rows[j][k]`.
    pub fn from_rows(rows: &[Vec<f64>], sigma2: f64, pmax: f64) -> Result<Self> {
        let users = rows.len();
        let mut gains = Vec::with_capacity(users * users);
        for row in rows {
            if row.len() != users {
                return Err(Error::DimensionMismatch {
                    expected: users,
                    got: row.len(),
                });
            }
            gains.extend_from_slice(row);
        }
        Self::new(users, gains, sigma2, pmax)
    }

    /// A diagonal network with `G[k][k] = 1` and per-user noise folded into
    /// the gains, so that `rate_k = ln(1 + p_k / z_k)` with `sigma2 = 1`.
    pub fn diagonal_from_noise(z: &[f64], pmax: f64) -> Result<Self> {
        let users = z.len();
        let mut gains = vec![0.0; users * users];
        for (k, zk) in z.iter().enumerate() {
            gains[k * users + k] = 1.0 / zk;
        }
        Self::new(users, gains, 1.0, pmax)
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn pmax(&self) -> f64 {
        self.pmax
    }

    /// Power gain from transmitter `j` to receiver `k`.
    #[inline]
    pub fn gain(&self, j: usize, k: usize) -> f64 {
        self.gains[j * self.users + k]
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Same channel with a different power cap.
    pub fn with_pmax(&self, pmax: f64) -> Result<Self> {
        Self::new(self.users, self.gains.clone(), self.sigma2, pmax)
    }

    /// Users reordered so that new user `i` is old user `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.users;
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut gains = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                gains[j * n + k] = self.gain(perm[j], perm[k]);
            }
        }
        Self::new(n, gains, self.sigma2, self.pmax)
    }

    pub fn check_feasible(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.users {
            return Err(Error::DimensionMismatch {
                expected: self.users,
                got: p.len(),
            });
        }
        let slack = FEASIBILITY_SLACK * self.pmax.max(1.0);
        for (k, &pk) in p.iter().enumerate() {
            if !pk.is_finite() || pk < -slack || pk > self.pmax + slack {
                return Err(Error::Infeasible(format!(
                    "p[{k}] = {pk} outside [0, {}]",
                    self.pmax
                )));
            }
        }
        Ok(())
    }

    /// SHA-256 over the little-endian bytes of `K`, the gains, `sigma2` and `pmax`.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.users as u64).to_le_bytes());
        for g in &self.gains {
            h.update(g.to_le_bytes());
        }
        h.update(self.sigma2.to_le_bytes());
        h.update(self.pmax.to_le_bytes());
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Signal power `A_k = p_k G[k][k]` and interference-plus-noise
/// `B_k = Σ_{j≠k} p_j G[j][k] + σ²` at receiver `k`. Assumes `p` has length `K`.
#[inline]
pub fn signal_interference_unchecked(inst: &NetworkInstance, p: &[f64], k: usize) -> (f64, f64) {
    let mut b = inst.sigma2;
    for (j, &pj) in p.iter().enumerate() {
        if j != k {
            b += pj * inst.gain(j, k);
        }
    }
    (p[k] * inst.gain(k, k), b)
}

pub fn signal_interference(inst: &NetworkInstance, p: &[f64], k: usize) -> Result<(f64, f64)> {
    inst.check_feasible(p)?;
    if k >= inst.users {
        return Err(Error::DimensionMismatch {
            expected: inst.users,
            got: k,
        });
    }
    Ok(signal_interference_unchecked(inst, p, k))
}

/// Per-user rates without the feasibility check.
pub fn rates_unchecked(inst: &NetworkInstance, p: &[f64]) -> Vec<f64> {
    (0..inst.users)
        .map(|k| {
            let (a, b) = signal_interference_unchecked(inst, p, k);
            (a / b).ln_1p()
        })
        .collect()
}

/// `r_k = ln(1 + A_k / B_k)` for every user.
pub fn rates(inst: &NetworkInstance, p: &[f64]) -> Result<Vec<f64>> {
    inst.check_feasible(p)?;
    Ok(rates_unchecked(inst, p))
}

/// Parallel Gaussian channels with unit gain and per-user noise powers `z`,
/// sharing a total power budget. Users are stored in descending order of noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelChannelInstance {
    z: Vec<f64>,
    p_total: f64,
    /// `original_index[i]` is the caller's index of stored user `i`.
    original_index: Vec<usize>,
}

impl ParallelChannelInstance {
    pub fn new(z: Vec<f64>, p_total: f64) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        if z.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInstance("noise powers must be positive".into()));
        }
        if !(p_total > 0.0 && p_total.is_finite()) {
            return Err(Error::InvalidInstance(format!("p_total = {p_total} must be positive")));
        }
        let order = crate::percentile::descending_order(&z);
        let sorted = order.iter().map(|&i| z[i]).collect();
        Ok(Self {
            z: sorted,
            p_total,
            original_index: order,
        })
    }

    pub fn users(&self) -> usize {
        self.z.len()
    }

    /// Noise powers, descending.
    pub fn noise(&self) -> &[f64] {
        &self.z
    }

    pub fn p_total(&self) -> f64 {
        self.p_total
    }

    pub fn original_index(&self) -> &[usize] {
        &self.original_index
    }

    pub fn check_feasible(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.z.len() {
            return Err(Error::DimensionMismatch {
                expected: self.z.len(),
                got: p.len(),
            });
        }
        let slack = FEASIBILITY_SLACK * self.p_total.max(1.0);
        if let Some((k, pk)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < -slack) {
            return Err(Error::Infeasible(format!("p[{k}] = {pk} is negative")));
        }
        let total: f64 = p.iter().sum();
        if total > self.p_total + slack {
            return Err(Error::Infeasible(format!(
                "total power {total} exceeds budget {}",
                self.p_total
            )));
        }
        Ok(())
    }
}

/// `r_k = ln(1 + p_k / z_k)`.
pub fn parallel_rates(inst: &ParallelChannelInstance, p: &[f64]) -> Result<Vec<f64>> {
    inst.check_feasible(p)?;
    Ok(p.iter()
        .zip(&inst.z)
        .map(|(pk, zk)| (pk.max(0.0) / zk).ln_1p())
        .collect())
}

/// Parameters of the hexagonal multicell drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub cells: usize,
    pub users_per_cell: usize,
    pub isd_m: f64,
    pub d0_m: f64,
    pub zeta: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub pmax_dbm: f64,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            cells: 7,
            users_per_cell: 8,
            isd_m: 2000.0,
            d0_m: 0.3920,
            zeta: 3.76,
            noise_psd_dbm_hz: -143.0,
            bandwidth_hz: 20e6,
            pmax_dbm: 43.0,
            seed: 0,
        }
    }
}

impl NetworkConfig {
    pub fn users(&self) -> usize {
        self.cells * self.users_per_cell
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells != 7 {
            return Err(Error::config("cells", "the wraparound layout has exactly 7 cells"));
        }
        if self.users_per_cell == 0 {
            return Err(Error::config("users_per_cell", "must be at least 1"));
        }
        for (field, v) in [
            ("isd_m", self.isd_m),
            ("d0_m", self.d0_m),
            ("zeta", self.zeta),
            ("bandwidth_hz", self.bandwidth_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(field, format!("must be positive, got {v}")));
            }
        }
        for (field, v) in [
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
            ("pmax_dbm", self.pmax_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::config(field, "must be finite"));
            }
        }
        Ok(())
    }

    /// Receiver noise power in watts.
    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz
    }

    pub fn pmax_w(&self) -> f64 {
        dbm_to_watts(self.pmax_dbm)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Power pathloss `(1 + d/d0)^(-ζ)`.
pub fn pathloss(d: f64, d0: f64, zeta: f64) -> f64 {
    (1.0 + d / d0).powf(-zeta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Seven-cell hexagonal layout: the centre site and its six neighbours.
/// Neighbouring sites sit at angles 0°, 60°, ..., 300°.
#[derive(Debug, Clone)]
pub struct HexLayout {
    isd: f64,
    sites: Vec<Point>,
    /// Translations of the seven-cell cluster onto its six mirror copies.
    mirrors: Vec<Point>,
}

impl HexLayout {
    pub fn new(isd: f64) -> Self {
        let dir = |deg: f64| {
            let r = deg.to_radians();
            Point {
                x: r.cos(),
                y: r.sin(),
            }
        };
        let mut sites = vec![Point { x: 0.0, y: 0.0 }];
        for i in 0..6 {
            let u = dir(60.0 * i as f64);
            sites.push(Point {
                x: isd * u.x,
                y: isd * u.y,
            });
        }
        // 2·a1 + a2 with a1 = (1, 0), a2 = (1/2, √3/2) in units of isd; |T| = √7·isd.
        let base_angle = (3f64.sqrt() / 2.0).atan2(2.5);
        let mirrors = (0..6)
            .map(|i| {
                let a = base_angle + PI / 3.0 * i as f64;
                let r = isd * 7f64.sqrt();
                Point {
                    x: r * a.cos(),
                    y: r * a.sin(),
                }
            })
            .collect();
        Self { isd, sites, mirrors }
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    /// Whether `p` (relative to a site) lies inside that site's hexagon.
    pub fn inside_cell(&self, dx: f64, dy: f64) -> bool {
        let half = self.isd / 2.0;
        (0..3).all(|i| {
            let a = (60.0 * i as f64).to_radians();
            (dx * a.cos() + dy * a.sin()).abs() <= half
        })
    }

    /// Uniform point inside the hexagon of `site`.
    pub fn sample_in_cell<R: Rng>(&self, site: usize, rng: &mut R) -> Point {
        // Circumradius of a cell is isd / √3.
        let r = self.isd / 3f64.sqrt();
        loop {
            let dx = rng.random_range(-r..r);
            let dy = rng.random_range(-r..r);
            if self.inside_cell(dx, dy) {
                let c = self.sites[site];
                return Point {
                    x: c.x + dx,
                    y: c.y + dy,
                };
            }
        }
    }

    /// Shortest distance from `a` to `b` over the cluster and its six mirror images.
    pub fn wrapped_distance(&self, a: Point, b: Point) -> f64 {
        self.mirrors
            .iter()
            .map(|t| {
                a.dist(Point {
                    x: b.x + t.x,
                    y: b.y + t.y,
                })
            })
            .fold(a.dist(b), f64::min)
    }
}

/// A generated drop: user positions, serving cells and the resulting channel.
#[derive(Debug, Clone)]
pub struct CellularDrop {
    pub instance: NetworkInstance,
    pub user_positions: Vec<Point>,
    pub serving_cell: Vec<usize>,
}

/// Drop `users_per_cell` users uniformly into each cell and draw block Rayleigh
/// fading. Transmitter `j` sits at the site serving user `j`.
pub fn generate_cellular(config: &NetworkConfig) -> Result<NetworkInstance> {
    Ok(generate_cellular_drop(config)?.instance)
}

pub fn generate_cellular_drop(config: &NetworkConfig) -> Result<CellularDrop> {
    config.validate()?;
    let layout = HexLayout::new(config.isd_m);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.users();

    let mut user_positions = Vec::with_capacity(n);
    let mut serving_cell = Vec::with_capacity(n);
    for cell in 0..config.cells {
        for _ in 0..config.users_per_cell {
            user_positions.push(layout.sample_in_cell(cell, &mut rng));
            serving_cell.push(cell);
        }
    }

    let mut gains = vec![0.0; n * n];
    for j in 0..n {
        let tx = layout.sites()[serving_cell[j]];
        for k in 0..n {
            let d = layout.wrapped_distance(tx, user_positions[k]);
            // |g|² for unit-variance circularly symmetric g is Exp(1).
            let fading: f64 = Exp1.sample(&mut rng);
            gains[j * n + k] = pathloss(d, config.d0_m, config.zeta) * fading;
        }
    }
    // Exp(1) can return exactly zero only with vanishing probability; guard the diagonal.
    for k in 0..n {
        if gains[k * n + k] <= 0.0 {
            gains[k * n + k] = f64::MIN_POSITIVE;
        }
    }

    let instance = NetworkInstance::new(n, gains, config.noise_power_w(), config.pmax_w())?;
    Ok(CellularDrop {
        instance,
        user_positions,
        serving_cell,
    })
}

/// Uniform random powers in `[0, pmax]`.
pub fn random_powers(users: usize, pmax: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..users).map(|_| rng.random_range(0.0..=pmax)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn identity2() -> NetworkInstance {
        NetworkInstance::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1.0, 10.0).unwrap()
    }

    #[test]
    fn rates_without_cross_gains() {
        let r = rates(&identity2(), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(r[0], 2f64.ln(), epsilon = 1e-15);
        assert_eq!(r[1], 0.0);
        assert_eq!(rates(&identity2(), &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn rates_symmetric_interference() {
        let inst = NetworkInstance::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], 1.0, 2.0).unwrap();
        let r = rates(&inst, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(r[0], 1.5f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(r[1], 1.5f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn rates_reject_infeasible_power() {
        let inst = identity2();
        assert!(matches!(rates(&inst, &[11.0, 0.0]), Err(Error::Infeasible(_))));
        assert!(matches!(rates(&inst, &[-1.0, 0.0]), Err(Error::Infeasible(_))));
        assert!(matches!(rates(&inst, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn signal_and_interference() {
        assert_eq!(signal_interference(&identity2(), &[2.0, 3.0], 0).unwrap(), (2.0, 1.0));
        assert_eq!(signal_interference(&identity2(), &[0.0, 0.0], 1).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn parallel_channel_rates() {
        let inst = ParallelChannelInstance::new(vec![1.0, 1.0], 2.0).unwrap();
        let r = parallel_rates(&inst, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(r[0], 2f64.ln());
        assert_relative_eq!(r[1], 2f64.ln());
        assert_eq!(parallel_rates(&inst, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let single = ParallelChannelInstance::new(vec![2.0], 2.0).unwrap();
        assert_relative_eq!(parallel_rates(&single, &[2.0]).unwrap()[0], 2f64.ln());
        assert!(parallel_rates(&inst, &[1.5, 1.0]).is_err());
    }

    #[test]
    fn parallel_instance_sorts_by_descending_noise() {
        let inst = ParallelChannelInstance::new(vec![0.1, 0.05, 250.1, 200.4, 5.4, 3.7], 10.0).unwrap();
        assert_eq!(inst.noise(), &[250.1, 200.4, 5.4, 3.7, 0.1, 0.05]);
        assert_eq!(inst.original_index(), &[2, 3, 4, 5, 0, 1]);
    }

    #[test]
    fn unit_conversions() {
        let cfg = NetworkConfig::default();
        // -143 dBm/Hz over 20 MHz is -69.99 dBm, i.e. 1.0e-10 W to three digits.
        assert_relative_eq!(cfg.noise_power_w(), 10f64.powf(-17.3) * 2e7, max_relative = 1e-12);
        assert_relative_eq!(cfg.noise_power_w(), 1.0e-10, max_relative = 3e-3);
        assert_relative_eq!(cfg.pmax_w(), 10f64.powf(1.3), max_relative = 1e-12);
        assert_relative_eq!(cfg.pmax_w(), 19.953, epsilon = 1e-3);
    }

    #[test]
    fn pathloss_is_monotone() {
        assert_eq!(pathloss(0.0, 0.392, 3.76), 1.0);
        let mut prev = 1.0;
        for i in 1..200 {
            let v = pathloss(i as f64 * 10.0, 0.392, 3.76);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = NetworkConfig {
            users_per_cell: 2,
            seed: 17,
            ..Default::default()
        };
        let a = generate_cellular(&cfg).unwrap();
        let b = generate_cellular(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = generate_cellular(&NetworkConfig { seed: 18, ..cfg }).unwrap();
        assert_ne!(a.gains(), c.gains());
        assert_eq!(a.users(), 14);
    }

    #[test]
    fn users_land_in_their_cells() {
        let cfg = NetworkConfig {
            users_per_cell: 20,
            seed: 3,
            ..Default::default()
        };
        let drop = generate_cellular_drop(&cfg).unwrap();
        let layout = HexLayout::new(cfg.isd_m);
        for (pos, &cell) in drop.user_positions.iter().zip(&drop.serving_cell) {
            let site = layout.sites()[cell];
            assert!(layout.inside_cell(pos.x - site.x, pos.y - site.y));
        }
    }

    #[test]
    fn wraparound_distances() {
        let layout = HexLayout::new(1000.0);
        // Opposite outer sites become neighbours on the torus.
        let a = layout.sites()[1];
        let b = layout.sites()[4];
        assert_relative_eq!(a.dist(b), 2000.0, epsilon = 1e-9);
        assert_relative_eq!(layout.wrapped_distance(a, b), 1000.0, epsilon = 1e-6);
        // In the seven-cell torus every pair of distinct sites is adjacent.
        for (i, s) in layout.sites().iter().enumerate() {
            for t in &layout.sites()[i + 1..] {
                assert_relative_eq!(layout.wrapped_distance(*s, *t), 1000.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let inst = identity2();
        let s = inst.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["K"], 2);
        assert_eq!(v["G"].as_array().unwrap().len(), 4);
        assert_eq!(NetworkInstance::from_json(&s).unwrap(), inst);
        let bad = r#"{"K": 2, "G": [1, 0, 0], "sigma2": 1, "pmax": 1}"#;
        assert!(NetworkInstance::from_json(bad).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        for seed in 0..5 {
            let inst = generate_cellular(&NetworkConfig {
                users_per_cell: 2,
                seed,
                ..Default::default()
            })
            .unwrap();
            let back = NetworkInstance::from_json(&inst.to_json().unwrap()).unwrap();
            assert_eq!(back.fingerprint(), inst.fingerprint());
        }
    }
}
