use std::f64::consts::PI;

use crate::algebra::RatFun;
use crate::error::{Error, Result};

/// Angular offset of the sampling rays, keeping them off the coordinate axes.
pub const DECAY_RAY_OFFSET: f64 = 0.1;

const SAMPLES_PER_RAY: usize = 41;

/// Decay exponent of `|f|` at infinity: the least-squares slope of
/// `log|f|` against `log r` on `n_rays` rays at angles `2 pi k / n + 0.1`,
/// averaged over the rays. Negative for decaying functions.
pub fn estimate_decay(f: &RatFun, r_min: f64, r_max: f64, n_rays: usize) -> Result<f64> {
    if !(r_min > 0.0 && r_max > r_min) || n_rays == 0 {
        return Err(Error::InvalidParams(format!("need 0 < r_min < r_max and n_rays > 0, got {r_min}, {r_max}, {n_rays}")));
    }
    let (lo, hi) = (r_min.ln(), r_max.ln());
    let mut total = 0.0;
    for k in 0..n_rays {
        let phi = 2.0 * PI * k as f64 / n_rays as f64 + DECAY_RAY_OFFSET;
        let (c, s) = (phi.cos(), phi.sin());
        let mut pts = Vec::with_capacity(SAMPLES_PER_RAY);
        for j in 0..SAMPLES_PER_RAY {
            let lr = lo + (hi - lo) * j as f64 / (SAMPLES_PER_RAY - 1) as f64;
            let r = lr.exp();
            let v = f.eval_xyt(r * c, r * s, 0.0)?.norm();
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidParams(format!("|f| = {v} at r = {r}, angle {phi}")));
            }
            pts.push((lr, v.ln()));
        }
        total += ls_slope(&pts);
    }
    Ok(total / n_rays as f64)
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
