//! Least-squares power-law fits.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    /// Fitted exponent p in y ~ c x^p.
    pub exponent: f64,
    pub log_prefactor: f64,
    /// Root-mean-square residual in log y.
    pub residual: f64,
    pub points: usize,
}

/// Fits log y = log c + p log x over the positive samples.
pub fn power_law(xs: &[f64], ys: &[f64]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - icpt - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some(PowerFit {
        exponent: slope,
        log_prefactor: icpt,
        residual,
        points: pts.len(),
    })
}

/// n log-spaced integers between lo and hi (inclusive, deduplicated).
pub fn log_spaced(lo: u32, hi: u32, n: usize) -> Vec<u32> {
    let mut out: Vec<u32> = (0..n)
        .map(|i| {
            let t = if n == 1 {
                0.0
            } else {
                i as f64 / (n - 1) as f64
            };
            ((lo as f64).ln() + t * ((hi as f64).ln() - (lo as f64).ln()))
                .exp()
                .round() as u32
        })
        .collect();
    out.dedup();
    out
}
