//! Deterministic Monte Carlo aggregation.
//!
//! Trials may run on any number of worker threads: each trial derives its own
//! random stream from `(seed, trial_index)` and all aggregation happens in
//! exact integer arithmetic, so the summary is byte-identical regardless of
//! scheduling.

use super::frame::run_frame_validated;
use super::{FrameOutcome, SchemeId, SimError};
use crate::channel::{validate_profile, FrameConfig, LinkProfile, RandomStream, TruncationPolicy};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Empirical distribution summary of the total frame size.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub trials: u64,
    /// Mean of the consumed frame size over all trials (outages count the
    /// slots they consumed before hitting the cap).
    pub mean_total: f64,
    /// Sample variance of the consumed frame size.
    pub var_total: f64,
    /// Frequencies of the consumed frame size.
    pub histogram: BTreeMap<u64, u64>,
    pub outage_rate: f64,
    /// Mean frame size conditioned on completion; `None` when every frame
    /// ended in outage.
    pub mean_total_given_ok: Option<f64>,
    /// Delivered primary packets per resource unit, `Np / mean_total_given_ok`.
    pub throughput_primary: Option<f64>,
    /// Delivered secondary packets per resource unit.
    pub throughput_secondary: Option<f64>,
}

#[derive(Default, Clone)]
struct Tally {
    n: u64,
    sum: u128,
    sum_sq: u128,
    outages: u64,
    n_ok: u64,
    sum_ok: u128,
    hist: BTreeMap<u64, u64>,
}

impl Tally {
    fn add(mut self, out: &FrameOutcome) -> Self {
        self.n += 1;
        self.sum += u128::from(out.total);
        self.sum_sq += u128::from(out.total) * u128::from(out.total);
        if out.outage {
            self.outages += 1;
        } else {
            self.n_ok += 1;
            self.sum_ok += u128::from(out.total);
        }
        *self.hist.entry(out.total).or_insert(0) += 1;
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.outages += other.outages;
        self.n_ok += other.n_ok;
        self.sum_ok += other.sum_ok;
        for (k, v) in other.hist {
            *self.hist.entry(k).or_insert(0) += v;
        }
        self
    }
}

/// Aggregate `trials` frames of `scheme`, one derived stream per trial.
pub fn monte_carlo(
    scheme: SchemeId,
    profile: &LinkProfile,
    config: &FrameConfig,
    policy: &TruncationPolicy,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalSummary, SimError> {
    if trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    let profile = validate_profile(*profile, config)?;
    policy.validate_against(config)?;

    let tally = (0..trials)
        .into_par_iter()
        .fold(Tally::default, |tally, trial| {
            let mut stream = RandomStream::new(seed, trial);
            let out = run_frame_validated(scheme, &profile, config, policy, &mut stream);
            tally.add(&out)
        })
        .reduce(Tally::default, Tally::merge);

    let n = tally.n as f64;
    let sum = tally.sum as f64;
    let mean = sum / n;
    let var = if tally.n > 1 {
        ((tally.sum_sq as f64) - sum * sum / n) / (n - 1.0)
    } else {
        0.0
    };
    let mean_ok = (tally.n_ok > 0).then(|| tally.sum_ok as f64 / tally.n_ok as f64);
    Ok(EmpiricalSummary {
        trials,
        mean_total: mean,
        var_total: var.max(0.0),
        histogram: tally.hist,
        outage_rate: tally.outages as f64 / n,
        mean_total_given_ok: mean_ok,
        throughput_primary: mean_ok.map(|m| f64::from(config.n_primary) / m),
        throughput_secondary: mean_ok.map(|m| f64::from(config.n_secondary) / m),
    })
}
