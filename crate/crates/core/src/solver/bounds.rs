use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `prod_{k=1..j} 1/(1 + k/n)`.
pub fn ratio_product(j: usize, n: f64) -> f64 {
    (1..=j).map(|k| -(k as f64 / n).ln_1p()).sum::<f64>().exp()
}

/// Exponential envelope `(e^{-j^2/n}, e^{-j^2/(4n)})` of [`ratio_product`].
/// The product lies inside whenever `1 <= j <= n`.
pub fn exp_product_bounds(j: usize, n: f64) -> Result<(f64, f64)> {
    if j == 0 {
        return Err(Error::Domain("product index j must be at least 1".into()));
    }
    if !(n > 0.0) {
        return Err(Error::Domain(format!("system size must be positive, got {n}")));
    }
    let sq = (j * j) as f64;
    Ok(((-sq / n).exp(), (-sq / (4.0 * n)).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Lower and upper curves for the average age of a ring of `n` nodes with
/// `c * n^alpha` jammers, at `lambda_s = lambda`.
///
/// `lower = sqrt(pi/2) sqrt(n) [alpha < 1/2] + c n^alpha exp(-n^{1-2 alpha} / (2 c^2))`,
/// `upper = c n^alpha + sqrt(pi/2) sqrt(n) + c`.
pub fn ring_scaling_bounds(n: f64, alpha: f64, c: f64) -> Result<ScalingBounds> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if !(c > 0.0) {
        return Err(Error::Domain(format!("scale c must be positive, got {c}")));
    }
    if !(n >= 1.0) {
        return Err(Error::Domain(format!("n must be at least 1, got {n}")));
    }
    let gaussian = FRAC_PI_2.sqrt() * n.sqrt();
    let jammers = c * n.powf(alpha);
    let decay = (-n.powf(1.0 - 2.0 * alpha) / (2.0 * c * c)).exp();
    let lower = if alpha < 0.5 { gaussian } else { 0.0 } + jammers * decay;
    let upper = jammers + gaussian + c;
    Ok(ScalingBounds { lower, upper })
}
