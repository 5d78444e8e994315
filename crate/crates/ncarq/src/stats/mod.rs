//! Exact discrete distributions, normal machinery, order-statistics moments
//! and the two-receiver broadcast efficiency.
//!
//! Everything in this module is a pure function of its arguments and generic
//! over the scalar type (see [`crate::scalar::Real`]).

mod broadcast;
mod negbin;
mod normal;
mod truncated;

pub use broadcast::broadcast_efficiency_2;
pub use negbin::{nb_normal_approx, nb_normal_approx_load, neg_binomial_pmf};
pub use normal::{
    max_of_normals_moments, min_of_normals_mean, std_normal_cdf, std_normal_pdf,
    std_normal_quantile, std_normal_sf, NormalMoments,
};
pub use truncated::{truncate_upper, truncated_pdf_cdf, TruncatedMoments};

/// Errors raised by the statistics layer.
#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    /// A probability argument was outside its valid domain.
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    /// A failure probability of 1 makes the expected trial count infinite.
    InfiniteExpectation { name: &'static str },
    /// Total trials below the required number of successes.
    TrialsBelowSuccesses { total_trials: u64, successes: u64 },
    /// Negative-binomial laws need at least one success.
    ZeroSuccesses,
    /// Quantile argument must lie strictly inside (0, 1).
    QuantileOutOfRange { value: f64 },
    /// Moments with negative or non-finite standard deviation.
    InvalidMoments { mean: f64, std_dev: f64 },
    /// Operation requires a strictly positive standard deviation.
    DegenerateStdDev,
    /// The truncation point removes essentially all probability mass.
    TruncationUnderflow { cap: f64, mean: f64, std_dev: f64 },
}

impl core::fmt::Display for StatsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StatsError::ProbabilityOutOfRange { name, value } => {
                write!(f, "probability `{name}` = {value} is outside its valid range")
            }
            StatsError::InfiniteExpectation { name } => {
                write!(f, "`{name}` = 1 gives an infinite expected number of trials")
            }
            StatsError::TrialsBelowSuccesses { total_trials, successes } => {
                write!(f, "total trials {total_trials} below required successes {successes}")
            }
            StatsError::ZeroSuccesses => write!(f, "at least one success is required"),
            StatsError::QuantileOutOfRange { value } => {
                write!(f, "quantile argument {value} must lie strictly inside (0, 1)")
            }
            StatsError::InvalidMoments { mean, std_dev } => {
                write!(f, "invalid normal moments: mean = {mean}, std_dev = {std_dev}")
            }
            StatsError::DegenerateStdDev => {
                write!(f, "operation requires a strictly positive standard deviation")
            }
            StatsError::TruncationUnderflow { cap, mean, std_dev } => write!(
                f,
                "truncation at {cap} removes essentially all mass of N({mean}, {std_dev})"
            ),
        }
    }
}

impl std::error::Error for StatsError {}
