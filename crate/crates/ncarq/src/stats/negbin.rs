//! Negative-binomial trial counts and their normal approximation.
//!
//! `NB(B, N, p)` is the law of the total number of Bernoulli trials `B`
//! needed for `N` successes when each trial fails independently with
//! probability `p`; its mean is `N/(1-p)` and its variance `N*p/(1-p)^2`.

use super::{NormalMoments, StatsError};
use crate::scalar::{cnt, Real};

/// Probability that exactly `total_trials` trials are needed for
/// `successes` successes at per-trial failure probability `fail_prob`.
pub fn neg_binomial_pmf<T: Real>(
    total_trials: u64,
    successes: u64,
    fail_prob: T,
) -> Result<T, StatsError> {
    if successes == 0 {
        return Err(StatsError::ZeroSuccesses);
    }
    if total_trials < successes {
        return Err(StatsError::TrialsBelowSuccesses { total_trials, successes });
    }
    let p = fail_prob.to_f64().unwrap_or(f64::NAN);
    if !(0.0..1.0).contains(&p) {
        if p == 1.0 {
            return Err(StatsError::InfiniteExpectation { name: "fail_prob" });
        }
        return Err(StatsError::ProbabilityOutOfRange { name: "fail_prob", value: p });
    }
    if fail_prob == T::zero() {
        return Ok(if total_trials == successes { T::one() } else { T::zero() });
    }
    // log C(B-1, N-1) + (B-N) ln p + N ln(1-p), evaluated in the scalar type
    let failures = total_trials - successes;
    let mut ln_choose = T::zero();
    for i in 1..successes {
        ln_choose = ln_choose + (cnt::<T>(failures + i)).ln() - (cnt::<T>(i)).ln();
    }
    let ln_pmf = ln_choose
        + cnt::<T>(failures) * fail_prob.ln()
        + cnt::<T>(successes) * (T::one() - fail_prob).ln();
    Ok(ln_pmf.exp())
}

/// Normal approximation `N(mu, sigma)` with `mu = N/(1-p)` and
/// `sigma = sqrt(N*p)/(1-p)` for an integer success count.
pub fn nb_normal_approx<T: Real>(successes: u64, fail_prob: T) -> Result<NormalMoments<T>, StatsError> {
    if successes == 0 {
        return Err(StatsError::ZeroSuccesses);
    }
    nb_normal_approx_load(cnt(successes), fail_prob)
}

/// Same approximation with a fractional success load, as used when an
/// expected packet count stands in for a realized one.
pub fn nb_normal_approx_load<T: Real>(load: T, fail_prob: T) -> Result<NormalMoments<T>, StatsError> {
    let p = fail_prob.to_f64().unwrap_or(f64::NAN);
    if !(0.0..1.0).contains(&p) {
        if p == 1.0 {
            return Err(StatsError::InfiniteExpectation { name: "fail_prob" });
        }
        return Err(StatsError::ProbabilityOutOfRange { name: "fail_prob", value: p });
    }
    if load < T::zero() {
        return Err(StatsError::InvalidMoments {
            mean: load.to_f64().unwrap_or(f64::NAN),
            std_dev: 0.0,
        });
    }
    let compl = T::one() - fail_prob;
    let mean = load / compl;
    let std_dev = (load * fail_prob).sqrt() / compl;
    NormalMoments::new(mean, std_dev)
}
