//! Upper-truncated normal moments, pdf and cdf.

use super::{std_normal_cdf, std_normal_pdf, NormalMoments, StatsError};
use crate::scalar::Real;

/// Moments of a normal distribution truncated from above at `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMoments<T: Real> {
    mean: T,
    std_dev: T,
    cap: T,
}

impl<T: Real> TruncatedMoments<T> {
    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn std_dev(&self) -> T {
        self.std_dev
    }

    /// Upper truncation point.
    pub fn cap(&self) -> T {
        self.cap
    }
}

/// Truncate `m` from above at `cap`.
///
/// With `beta = (cap - mean)/sigma` and hazard `h = phi(beta)/Phi(beta)`:
/// `mean' = mean - sigma*h` and `var' = var * (1 - beta*h - h^2)`.
pub fn truncate_upper<T: Real>(
    m: NormalMoments<T>,
    cap: T,
) -> Result<TruncatedMoments<T>, StatsError> {
    if m.std_dev() <= T::zero() {
        return Err(StatsError::DegenerateStdDev);
    }
    let beta = (cap - m.mean()) / m.std_dev();
    let mass = std_normal_cdf(beta);
    if !(mass > T::zero()) {
        return Err(StatsError::TruncationUnderflow {
            cap: cap.to_f64().unwrap_or(f64::NAN),
            mean: m.mean().to_f64().unwrap_or(f64::NAN),
            std_dev: m.std_dev().to_f64().unwrap_or(f64::NAN),
        });
    }
    let hazard = std_normal_pdf(beta) / mass;
    let mean = m.mean() - m.std_dev() * hazard;
    let var = (m.variance() * (T::one() - beta * hazard - hazard * hazard)).max(T::zero());
    Ok(TruncatedMoments { mean, std_dev: var.sqrt(), cap })
}

/// Density and cumulative probability of the upper-truncated normal at `x`:
/// the parent values renormalized by the retained mass for `x <= cap`, and
/// `(0, 1)` beyond the truncation point.
pub fn truncated_pdf_cdf<T: Real>(
    m: NormalMoments<T>,
    cap: T,
    x: T,
) -> Result<(T, T), StatsError> {
    if m.std_dev() <= T::zero() {
        return Err(StatsError::DegenerateStdDev);
    }
    let beta = (cap - m.mean()) / m.std_dev();
    let mass = std_normal_cdf(beta);
    if !(mass > T::zero()) {
        return Err(StatsError::TruncationUnderflow {
            cap: cap.to_f64().unwrap_or(f64::NAN),
            mean: m.mean().to_f64().unwrap_or(f64::NAN),
            std_dev: m.std_dev().to_f64().unwrap_or(f64::NAN),
        });
    }
    if x > cap {
        return Ok((T::zero(), T::one()));
    }
    let z = (x - m.mean()) / m.std_dev();
    let pdf = std_normal_pdf(z) / m.std_dev() / mass;
    let cdf = (std_normal_cdf(z) / mass).min(T::one());
    Ok((pdf, cdf))
}
