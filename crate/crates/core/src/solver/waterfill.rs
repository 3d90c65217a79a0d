use crate::error::{Error, Result};

/// Water-filling: `p_k = max(0, μ − z_k)` with the level `μ` chosen so that
/// `Σ p = p_total`. Maximizes `Σ ln(1 + p_k / z_k)` over the capped simplex.
pub fn water_fill(z: &[f64], p_total: f64) -> Result<Vec<f64>> {
    if z.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    if z.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInstance("noise powers must be positive".into()));
    }
    if !(p_total > 0.0 && p_total.is_finite()) {
        return Err(Error::InvalidInstance(format!("p_total = {p_total} must be positive")));
    }
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut level = sorted[0] + p_total;
    let mut floor_sum = 0.0;
    for (m, zm) in sorted.iter().enumerate() {
        floor_sum += zm;
        let candidate = (p_total + floor_sum) / (m + 1) as f64;
        let next = sorted.get(m + 1).copied().unwrap_or(f64::INFINITY);
        if candidate <= next {
            level = candidate;
            break;
        }
    }
    Ok(z.iter().map(|zk| (level - zk).max(0.0)).collect())
}
