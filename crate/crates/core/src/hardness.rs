//! Instances from the maximum-independent-set reduction, with exact
//! brute-force oracles.
//!
//! A graph on `K` vertices has its first `K − Kq` vertices isolated and a
//! connected component on the last `Kq`. The network has unit direct gains,
//! noise `L` and cross gain `L·Kq²` between adjacent vertices, with
//! `pmax = 1`. Its optimal sum of the `Kq` smallest rates is
//! `|I|·ln(1 + 1/L)` where `|I|` is the component's independence number.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{rates_unchecked, NetworkInstance};
use crate::percentile::slqp;

/// Largest `K` accepted by the binary enumeration.
pub const MAX_BRUTE_FORCE_USERS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentGraph {
    k: usize,
    kq: usize,
    l: f64,
    /// Undirected edges `(a, b)` with `a < b`, 0-based, sorted.
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Canonical {
    Path,
    Cycle,
    Clique,
    Star,
}

impl ComponentGraph {
    /// Edges use 0-based vertex indices and must join vertices in `K−Kq..K`.
    pub fn new(k: usize, kq: usize, l: f64, edges: &[(usize, usize)]) -> Result<Self> {
        if kq < 2 {
            return Err(Error::InvalidGraph(format!(
                "Kq = {kq}: the reduction needs Kq ≥ 2 (it does not cover max-min)"
            )));
        }
        if kq > k {
            return Err(Error::InvalidGraph(format!("Kq = {kq} exceeds K = {k}")));
        }
        if !(l > kq as f64) || !l.is_finite() {
            return Err(Error::InvalidGraph(format!("L = {l} must exceed Kq = {kq}")));
        }
        let first = k - kq;
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let (a, b) = (a.min(b), a.max(b));
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {}", a + 1)));
            }
            if b >= k || a < first {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) leaves the component vertices {}..={k}",
                    a + 1,
                    b + 1,
                    first + 1
                )));
            }
            norm.push((a, b));
        }
        norm.sort_unstable();
        norm.dedup();
        let graph = Self {
            k,
            kq,
            l,
            edges: norm,
        };
        if !graph.component_connected() {
            return Err(Error::InvalidGraph("the component on the last Kq vertices is disconnected".into()));
        }
        Ok(graph)
    }

    /// A canonical component on `kq` vertices after `isolated` isolated ones.
    pub fn canonical(kind: Canonical, isolated: usize, kq: usize, l: f64) -> Result<Self> {
        let o = isolated;
        let edges: Vec<(usize, usize)> = match kind {
            Canonical::Path => (0..kq.saturating_sub(1)).map(|i| (o + i, o + i + 1)).collect(),
            Canonical::Cycle => {
                if kq < 3 {
                    return Err(Error::InvalidGraph("a cycle needs at least 3 vertices".into()));
                }
                (0..kq).map(|i| (o + i, o + (i + 1) % kq)).collect()
            }
            Canonical::Clique => (0..kq)
                .flat_map(|i| (i + 1..kq).map(move |j| (o + i, o + j)))
                .collect(),
            Canonical::Star => (1..kq).map(|i| (o, o + i)).collect(),
        };
        Self::new(isolated + kq, kq, l, &edges)
    }

    pub fn users(&self) -> usize {
        self.k
    }

    pub fn kq(&self) -> usize {
        self.kq
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Index of the first component vertex.
    pub fn first_component_vertex(&self) -> usize {
        self.k - self.kq
    }

    fn component_adjacency(&self) -> Vec<u32> {
        let first = self.first_component_vertex();
        let mut adj = vec![0u32; self.kq];
        for &(a, b) in &self.edges {
            adj[a - first] |= 1 << (b - first);
            adj[b - first] |= 1 << (a - first);
        }
        adj
    }

    fn component_connected(&self) -> bool {
        if self.kq > 32 {
            // Fall back to a plain search for wide components.
            let first = self.first_component_vertex();
            let mut seen = vec![false; self.kq];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &(a, b) in &self.edges {
                    let (a, b) = (a - first, b - first);
                    for (x, y) in [(a, b), (b, a)] {
                        if x == v && !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            return seen.into_iter().all(|s| s);
        }
        let adj = self.component_adjacency();
        let mut reached = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            for (v, row) in adj.iter().enumerate() {
                if frontier >> v & 1 == 1 {
                    next |= u64::from(*row);
                }
            }
            frontier = next & !reached;
            reached |= next;
        }
        reached.count_ones() as usize == self.kq
    }

    /// Parse `K Kq L` followed by one 1-indexed edge `j k` per line.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `K Kq L` header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `K Kq L`, got `{header}`"),
            });
        }
        let parse_err = |what: &str, v: &str| Error::Parse {
            line: line_no,
            message: format!("invalid {what} `{v}`"),
        };
        let k: usize = fields[0].parse().map_err(|_| parse_err("K", fields[0]))?;
        let kq: usize = fields[1].parse().map_err(|_| parse_err("Kq", fields[1]))?;
        let l: f64 = fields[2].parse().map_err(|_| parse_err("L", fields[2]))?;

        let mut edges = Vec::new();
        for (line_no, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[a, b]) if a >= 1 && b >= 1 => edges.push((a - 1, b - 1)),
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected a 1-indexed edge `j k`, got `{line}`"),
                    })
                }
            }
        }
        Self::new(k, kq, l, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {} {}\n", self.k, self.kq, self.l);
        for &(a, b) in &self.edges {
            writeln!(out, "{} {}", a + 1, b + 1).expect("writing to a String cannot fail");
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

/// The normalized reduction network: unit direct gains, cross gain `L·Kq²`
/// on edges, noise `L`, `pmax = 1`.
pub fn build_instance(graph: &ComponentGraph) -> Result<NetworkInstance> {
    let k = graph.k;
    let eta = graph.l * (graph.kq * graph.kq) as f64;
    let mut gains = vec![0.0; k * k];
    for i in 0..k {
        gains[i * k + i] = 1.0;
    }
    for &(a, b) in &graph.edges {
        gains[a * k + b] = eta;
        gains[b * k + a] = eta;
    }
    NetworkInstance::new(k, gains, graph.l, 1.0)
}

/// Exhaustive search over `p ∈ {0, pmax}^K`. Among near-equal maxima the
/// lexicographically smallest vector wins (`p_0` most significant).
pub fn brute_force_binary_optimum(inst: &NetworkInstance, kq: usize) -> Result<(Vec<f64>, f64)> {
    let k = inst.users();
    if k > MAX_BRUTE_FORCE_USERS {
        return Err(Error::TooLarge {
            size: k,
            limit: MAX_BRUTE_FORCE_USERS,
        });
    }
    if kq == 0 || kq > k {
        return Err(Error::PercentileNumberOutOfRange { kq, len: k });
    }
    let pmax = inst.pmax();
    let mut p = vec![0.0; k];
    let mut best = (0u64, f64::NEG_INFINITY);
    for code in 0..1u64 << k {
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = if code >> (k - 1 - i) & 1 == 1 { pmax } else { 0.0 };
        }
        let v = slqp(&rates_unchecked(inst, &p), kq)?;
        if code == 0 || v > best.1 + 1e-12 * best.1.abs().max(1.0) {
            best = (code, v);
        }
    }
    let p_best = (0..k)
        .map(|i| if best.0 >> (k - 1 - i) & 1 == 1 { pmax } else { 0.0 })
        .collect();
    Ok((p_best, best.1))
}

/// A maximum independent set of the component as sorted global vertex
/// indices; the lexicographically smallest list among the maximum ones.
pub fn mis_witness(graph: &ComponentGraph) -> Result<Vec<usize>> {
    if graph.kq > MAX_BRUTE_FORCE_USERS {
        return Err(Error::TooLarge {
            size: graph.kq,
            limit: MAX_BRUTE_FORCE_USERS,
        });
    }
    let n = graph.kq;
    let adj = graph.component_adjacency();
    let mut best: Option<u32> = None;
    // Vertex i maps to bit n-1-i so that descending codes visit sets in
    // lexicographic order of their indicator vectors, largest first.
    for code in (0..1u32 << n).rev() {
        let set: u32 = (0..n).filter(|i| code >> (n - 1 - i) & 1 == 1).fold(0, |s, i| s | 1 << i);
        let independent = (0..n).all(|v| set >> v & 1 == 0 || adj[v] & set == 0);
        if independent && best.is_none_or(|b| set.count_ones() > b.count_ones()) {
            best = Some(set);
        }
    }
    let set = best.unwrap_or(0);
    let first = graph.first_component_vertex();
    Ok((0..n).filter(|v| set >> v & 1 == 1).map(|v| first + v).collect())
}

/// Independence number of the component.
pub fn mis_size(graph: &ComponentGraph) -> Result<usize> {
    Ok(mis_witness(graph)?.len())
}

/// `|I|·ln(1 + 1/L)`.
pub fn expected_optimum(graph: &ComponentGraph) -> Result<f64> {
    Ok(mis_size(graph)? as f64 * graph.l.recip().ln_1p())
}

/// Isolated users and a maximum independent set at full power, the rest off.
pub fn achieving_assignment(graph: &ComponentGraph) -> Result<Vec<f64>> {
    let mut p = vec![0.0; graph.k];
    p[..graph.first_component_vertex()].fill(1.0);
    for v in mis_witness(graph)? {
        p[v] = 1.0;
    }
    Ok(p)
}
