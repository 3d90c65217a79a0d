//! Sum-least and sum-greatest percentile utilities.
//!
//! `slqp(x, kq)` is the sum of the `kq` smallest entries of `x` and is concave;
//! `sgqp(x, kq)` is the sum of the `kq` largest entries and is convex. Both are
//! evaluated by a stable sort, never by enumerating selection sets.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when comparing `100 k / K` against `q`, so that
/// percentiles written as decimal fractions (e.g. `100.0 / 6.0`) map to the
/// intended percentile number.
const PERCENTILE_SLACK: f64 = 1e-12;

/// The `(K, q, Kq)` triple selecting which percentile is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentileSpec {
    pub users: usize,
    pub q: f64,
    pub kq: usize,
}

impl PercentileSpec {
    pub fn new(users: usize, q: f64) -> Result<Self> {
        let kq = percentile_number(users, q)?;
        Ok(Self { users, q, kq })
    }
}

/// Binary selection vector with a fixed number of ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMask {
    bits: Vec<bool>,
    weight: usize,
}

impl SelectionMask {
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &i in indices {
            bits[i] = true;
        }
        let weight = bits.iter().filter(|b| **b).count();
        Self { bits, weight }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices with a one, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
    }

    /// The mask as a 0/1 float vector.
    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// `aᵀ y`.
    pub fn dot(&self, y: &[f64]) -> f64 {
        self.indices().map(|i| y[i]).sum()
    }
}

/// Smallest `k ≥ 1` with `100 k / users ≥ q`.
pub fn percentile_number(users: usize, q: f64) -> Result<usize> {
    if users == 0 {
        return Err(Error::EmptyNetwork);
    }
    if !(q > 0.0 && q <= 100.0) {
        return Err(Error::InvalidPercentile(q));
    }
    let threshold = q * (1.0 - PERCENTILE_SLACK);
    let kq = (1..=users)
        .find(|&k| 100.0 * k as f64 / users as f64 >= threshold)
        .unwrap_or(users);
    Ok(kq)
}

fn check_kq(len: usize, kq: usize) -> Result<()> {
    if kq == 0 || kq > len {
        return Err(Error::PercentileNumberOutOfRange { kq, len });
    }
    Ok(())
}

/// Indices of `x` in ascending order of value; equal values keep their
/// original (lowest index first) order.
pub fn ascending_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    idx
}

/// Indices of `x` in descending order of value, lowest index first on ties.
pub fn descending_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| match x[b].total_cmp(&x[a]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    idx
}

/// Sum of the `kq` smallest entries.
pub fn slqp(x: &[f64], kq: usize) -> Result<f64> {
    check_kq(x.len(), kq)?;
    let order = ascending_order(x);
    Ok(order[..kq].iter().map(|&i| x[i]).sum())
}

/// Sum of the `kq` largest entries.
pub fn sgqp(x: &[f64], kq: usize) -> Result<f64> {
    check_kq(x.len(), kq)?;
    let order = descending_order(x);
    Ok(order[..kq].iter().map(|&i| x[i]).sum())
}

/// Supergradient of `slqp` at `x`: the indicator of the `kq` smallest
/// entries, ties broken toward the lowest index.
pub fn slqp_supergradient(x: &[f64], kq: usize) -> Result<SelectionMask> {
    check_kq(x.len(), kq)?;
    let order = ascending_order(x);
    Ok(SelectionMask::from_indices(x.len(), &order[..kq]))
}
