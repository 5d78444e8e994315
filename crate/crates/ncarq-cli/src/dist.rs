//! Fitted-density helpers for the histogram command: the fitted normal (or
//! upper-truncated normal) is discretized to the integer frame-size support,
//! and the Kolmogorov-Smirnov distance is taken against that discretization.

use ncarq::stats::std_normal_cdf;
use std::collections::BTreeMap;

fn cdf(x: f64, mean: f64, sd: f64) -> f64 {
    std_normal_cdf((x - mean) / sd)
}

/// Probability the fitted normal rounds to the integer `b`.
pub fn normal_mass_at(b: u64, mean: f64, sd: f64) -> f64 {
    cdf(b as f64 + 0.5, mean, sd) - cdf(b as f64 - 0.5, mean, sd)
}

/// Probability the fitted upper-truncated normal rounds to `b <= cap`.
pub fn truncated_mass_at(b: u64, parent_mean: f64, parent_sd: f64, cap: u64) -> f64 {
    if b > cap {
        return 0.0;
    }
    let norm = cdf(cap as f64 + 0.5, parent_mean, parent_sd);
    let hi = cdf(b as f64 + 0.5, parent_mean, parent_sd);
    let lo = cdf(b as f64 - 0.5, parent_mean, parent_sd);
    (hi - lo) / norm
}

fn ks_against<F: Fn(u64) -> f64>(hist: &BTreeMap<u64, u64>, model_cdf_at: F) -> Option<f64> {
    let n: u64 = hist.values().sum();
    if n == 0 {
        return None;
    }
    let (&lo, _) = hist.iter().next().unwrap();
    let (&hi, _) = hist.iter().next_back().unwrap();
    let mut cum = 0u64;
    let mut ks: f64 = if lo > 0 { model_cdf_at(lo - 1) } else { 0.0 };
    for b in lo..=hi {
        cum += hist.get(&b).copied().unwrap_or(0);
        let emp = cum as f64 / n as f64;
        ks = ks.max((emp - model_cdf_at(b)).abs());
    }
    Some(ks)
}

/// KS distance between the empirical integer distribution and the
/// discretized normal fit; `None` for an empty or degenerate fit.
pub fn ks_discretized_normal(hist: &BTreeMap<u64, u64>, mean: f64, sd: f64) -> Option<f64> {
    if !(sd > 0.0) {
        return None;
    }
    ks_against(hist, |b| cdf(b as f64 + 0.5, mean, sd))
}

/// KS distance against the discretized upper-truncated normal fit.
pub fn ks_discretized_truncated(
    hist: &BTreeMap<u64, u64>,
    parent_mean: f64,
    parent_sd: f64,
    cap: u64,
) -> Option<f64> {
    if !(parent_sd > 0.0) {
        return None;
    }
    let norm = cdf(cap as f64 + 0.5, parent_mean, parent_sd);
    ks_against(hist, |b| {
        if b >= cap {
            1.0
        } else {
            cdf(b as f64 + 0.5, parent_mean, parent_sd) / norm
        }
    })
}
