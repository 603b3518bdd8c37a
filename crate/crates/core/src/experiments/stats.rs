use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A binomial proportion with its 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Proportion {
        let (low, high) = wilson_interval(hits, trials, Z95);
        let estimate = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
        Proportion { hits, trials, estimate, low, high }
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    /// Whether the two intervals are disjoint.
    pub fn separated_from(&self, other: &Proportion) -> bool {
        self.high < other.low || other.high < self.low
    }
}

pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Difference `p_a − p_b` of two independent proportions with a 95% interval
/// from the unpooled normal approximation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Difference {
    pub a: Proportion,
    pub b: Proportion,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

impl Difference {
    pub fn new(a: Proportion, b: Proportion) -> Difference {
        let var = |p: &Proportion| {
            if p.trials == 0 {
                0.0
            } else {
                p.estimate * (1.0 - p.estimate) / p.trials as f64
            }
        };
        let estimate = a.estimate - b.estimate;
        let half = Z95 * (var(&a) + var(&b)).sqrt();
        Difference { a, b, estimate, low: estimate - half, high: estimate + half }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Exponent with `rate ≈ C · N^{-alpha}`.
    pub alpha: f64,
    /// `ln C`.
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least squares on `(ln N, ln rate)`.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!("power-law fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, r)) = points.iter().find(|&&(n, r)| !(n > 0.0 && r > 0.0)) {
        return Err(Error::Precondition(format!("power-law fit needs positive N and rate, got ({n}, {r})")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("power-law fit needs at least two distinct N".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PowerLawFit { alpha: -slope, intercept, r_squared })
}
