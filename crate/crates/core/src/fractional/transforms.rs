//! Quadratic and logarithmic fractional transforms of the per-user rate.
//!
//! For fixed auxiliary variables both transformed rates are concave in the
//! powers, and choosing the auxiliary variables by the matching update makes
//! them equal to the true rate `ln(1 + A/B)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{signal_interference_unchecked, NetworkInstance};
use crate::solver::ConcaveTerms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transform {
    /// `ln(1 + 2x√A − x²B)`, updated by `x = √A / B`.
    Quadratic,
    /// `−xB + ln(x(A + B)) + 1`, updated by `x = 1 / B`.
    Logarithmic,
}

/// Auxiliary fractional-transform variables, one per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryState {
    pub x: Vec<f64>,
}

/// `ln(1 + 2x√A − x²B)`.
pub fn qft_aux_rate(x: f64, a: f64, b: f64) -> Result<f64> {
    let arg = 1.0 + 2.0 * x * a.sqrt() - x * x * b;
    if !(arg > 0.0) {
        return Err(Error::Domain(arg));
    }
    Ok(arg.ln())
}

/// `−xB + ln(x(A + B)) + 1`.
pub fn lft_aux_rate(x: f64, a: f64, b: f64) -> Result<f64> {
    let arg = x * (a + b);
    if !(x > 0.0) || !(arg > 0.0) {
        return Err(Error::Domain(arg));
    }
    Ok(-x * b + arg.ln() + 1.0)
}

/// `x_k = √A_k / B_k`.
pub fn qft_x_update(inst: &NetworkInstance, p: &[f64]) -> Result<AuxiliaryState> {
    inst.check_feasible(p)?;
    Ok(AuxiliaryState {
        x: (0..inst.users())
            .map(|k| {
                let (a, b) = signal_interference_unchecked(inst, p, k);
                a.max(0.0).sqrt() / b
            })
            .collect(),
    })
}

/// `x_k = 1 / B_k`.
pub fn lft_x_update(inst: &NetworkInstance, p: &[f64]) -> Result<AuxiliaryState> {
    inst.check_feasible(p)?;
    Ok(AuxiliaryState {
        x: (0..inst.users())
            .map(|k| 1.0 / signal_interference_unchecked(inst, p, k).1)
            .collect(),
    })
}

pub fn x_update(transform: Transform, inst: &NetworkInstance, p: &[f64]) -> Result<AuxiliaryState> {
    match transform {
        Transform::Quadratic => qft_x_update(inst, p),
        Transform::Logarithmic => lft_x_update(inst, p),
    }
}

/// Transformed rates at `p` for fixed `x`; `-inf` where the quadratic
/// transform leaves the logarithm's domain.
pub fn aux_rates(transform: Transform, inst: &NetworkInstance, x: &AuxiliaryState, p: &[f64]) -> Vec<f64> {
    (0..inst.users())
        .map(|k| {
            let (a, b) = signal_interference_unchecked(inst, p, k);
            let r = match transform {
                Transform::Quadratic => qft_aux_rate(x.x[k], a.max(0.0), b),
                Transform::Logarithmic => lft_aux_rate(x.x[k], a.max(0.0), b),
            };
            r.unwrap_or(f64::NEG_INFINITY)
        })
        .collect()
}

/// Transformed rates, optionally weighted, as smooth concave terms in `p`.
pub(crate) struct AuxTerms<'a> {
    pub inst: &'a NetworkInstance,
    pub transform: Transform,
    pub x: &'a [f64],
    pub weights: Option<&'a [f64]>,
}

impl AuxTerms<'_> {
    fn weight(&self, k: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[k])
    }
}

impl ConcaveTerms for AuxTerms<'_> {
    fn dim(&self) -> usize {
        self.inst.users()
    }

    fn terms(&self) -> usize {
        self.inst.users()
    }

    fn value(&self, k: usize, p: &[f64]) -> f64 {
        let (a, b) = signal_interference_unchecked(self.inst, p, k);
        let r = match self.transform {
            Transform::Quadratic => qft_aux_rate(self.x[k], a.max(0.0), b),
            Transform::Logarithmic => lft_aux_rate(self.x[k], a.max(0.0), b),
        };
        r.map_or(f64::NEG_INFINITY, |r| self.weight(k) * r)
    }

    fn eval(&self, k: usize, p: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let n = self.inst.users();
        let w = self.weight(k);
        let x = self.x[k];
        let inst = self.inst;
        match self.transform {
            Transform::Quadratic => {
                // u = 1 + 2x√(G_kk p_k) − x²(Σ_{j≠k} G_jk p_j + σ²)
                let gkk = inst.gain(k, k);
                let (a, b) = signal_interference_unchecked(inst, p, k);
                let u = 1.0 + 2.0 * x * a.max(0.0).sqrt() - x * x * b;
                if !(u > 0.0) || !(p[k] > 0.0 || x == 0.0) {
                    return f64::NEG_INFINITY;
                }
                for (j, g) in grad.iter_mut().enumerate() {
                    *g = if j == k {
                        if x == 0.0 {
                            0.0
                        } else {
                            x * gkk.sqrt() / p[k].sqrt()
                        }
                    } else {
                        -x * x * inst.gain(j, k)
                    };
                }
                let curv = if x == 0.0 {
                    0.0
                } else {
                    -x * gkk.sqrt() / (2.0 * p[k] * p[k].sqrt())
                };
                let inv_u = 1.0 / u;
                for i in 0..n {
                    for j in 0..n {
                        hess[i * n + j] -= w * grad[i] * grad[j] * inv_u * inv_u;
                    }
                }
                hess[k * n + k] += w * curv * inv_u;
                for g in grad.iter_mut() {
                    *g *= w * inv_u;
                }
                w * u.ln()
            }
            Transform::Logarithmic => {
                let (a, b) = signal_interference_unchecked(inst, p, k);
                let d = a + b;
                if !(x > 0.0) || !(d > 0.0) {
                    return f64::NEG_INFINITY;
                }
                let inv_d = 1.0 / d;
                for (j, g) in grad.iter_mut().enumerate() {
                    let gjk = inst.gain(j, k);
                    let own = if j == k { 0.0 } else { -x * gjk };
                    *g = w * (own + gjk * inv_d);
                }
                for i in 0..n {
                    let gi = inst.gain(i, k);
                    if gi == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        hess[i * n + j] -= w * gi * inst.gain(j, k) * inv_d * inv_d;
                    }
                }
                w * (-x * b + (x * d).ln() + 1.0)
            }
        }
    }
}
