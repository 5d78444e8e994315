//! Standard-normal pdf/cdf/quantile and order-statistics moments for the
//! maximum/minimum of two independent normal variables.
//!
//! The cdf is evaluated through Cody's rational approximations of erf/erfc
//! (absolute error below 1e-15, relative error below 4e-10 far into the
//! tail). The quantile uses Acklam's rational approximation polished by one
//! Newton step on the cdf, which pins the inverse to the cdf within 1e-9
//! over (1e-12, 1 - 1e-12).

use super::StatsError;
use crate::scalar::{cst, Real};

/// `1/sqrt(2*pi)`
const INV_SQRT_2PI: f64 = 0.3989422804014326779399;
/// `1/sqrt(pi)`
const INV_SQRT_PI: f64 = 0.5641895835477562869481;
/// `1/sqrt(2)`
const FRAC_1_SQRT_2: f64 = 0.7071067811865475244008;

/// Mean and standard deviation of a (approximately) normal transmission
/// count, both expressed in transmission slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMoments<T: Real> {
    mean: T,
    std_dev: T,
}

impl<T: Real> NormalMoments<T> {
    /// Build moments, rejecting a negative or non-finite standard deviation
    /// and a non-finite mean.
    pub fn new(mean: T, std_dev: T) -> Result<Self, StatsError> {
        if !mean.is_finite() || !std_dev.is_finite() || std_dev < T::zero() {
            return Err(StatsError::InvalidMoments {
                mean: mean.to_f64().unwrap_or(f64::NAN),
                std_dev: std_dev.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mean, std_dev })
    }

    /// A deterministic value: standard deviation zero.
    pub fn degenerate(mean: T) -> Self {
        Self { mean, std_dev: T::zero() }
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn std_dev(&self) -> T {
        self.std_dev
    }

    pub fn variance(&self) -> T {
        self.std_dev * self.std_dev
    }

    /// Moments of the sum of independent components: means and variances add.
    pub fn sum_of(parts: &[NormalMoments<T>]) -> Self {
        let mut mean = T::zero();
        let mut var = T::zero();
        for p in parts {
            mean = mean + p.mean;
            var = var + p.variance();
        }
        Self { mean, std_dev: var.sqrt() }
    }
}

/// Density of the standard normal distribution.
pub fn std_normal_pdf<T: Real>(x: T) -> T {
    cst::<T>(INV_SQRT_2PI) * (-x * x / cst(2.0)).exp()
}

/// Cumulative distribution function of the standard normal distribution.
pub fn std_normal_cdf<T: Real>(x: T) -> T {
    // Phi(x) = erfc(-x / sqrt(2)) / 2
    let arg = -x.to_f64().unwrap() * FRAC_1_SQRT_2;
    cst(0.5 * erfc(arg))
}

/// Survival function `Q(x) = 1 - Phi(x)`, accurate deep into the upper tail.
pub fn std_normal_sf<T: Real>(x: T) -> T {
    let arg = x.to_f64().unwrap() * FRAC_1_SQRT_2;
    cst(0.5 * erfc(arg))
}

/// Inverse of [`std_normal_cdf`]; `p` must lie strictly inside (0, 1).
pub fn std_normal_quantile<T: Real>(p: T) -> Result<T, StatsError> {
    let pf = p.to_f64().unwrap();
    if !(pf > 0.0 && pf < 1.0) {
        return Err(StatsError::QuantileOutOfRange { value: pf });
    }
    let mut x = acklam_inverse(pf);
    // One Newton step x <- x - (Phi(x) - p)/phi(x); the pdf is well above the
    // underflow threshold wherever Acklam is used as the seed.
    let cdf = 0.5 * erfc(-x * FRAC_1_SQRT_2);
    let pdf = INV_SQRT_2PI * (-0.5 * x * x).exp();
    if pdf > 0.0 {
        x -= (cdf - pf) / pdf;
    }
    Ok(cst(x))
}

/// Moments of `max(A, B)` for independent normals `A` and `B`.
///
/// With `theta = sqrt(var_a + var_b) = 0` both inputs are deterministic and
/// the result degenerates to the larger mean.
pub fn max_of_normals_moments<T: Real>(
    a: NormalMoments<T>,
    b: NormalMoments<T>,
) -> NormalMoments<T> {
    let theta2 = a.variance() + b.variance();
    if theta2 <= T::zero() {
        return NormalMoments::degenerate(a.mean().max(b.mean()));
    }
    let theta = theta2.sqrt();
    let d = (a.mean() - b.mean()) / theta;
    let cdf_pos = std_normal_cdf(d);
    let cdf_neg = std_normal_cdf(-d);
    let pdf = std_normal_pdf(d);
    let mean = a.mean() * cdf_pos + b.mean() * cdf_neg + theta * pdf;
    let second = (a.variance() + a.mean() * a.mean()) * cdf_pos
        + (b.variance() + b.mean() * b.mean()) * cdf_neg
        + (a.mean() + b.mean()) * theta * pdf;
    let var = (second - mean * mean).max(T::zero());
    NormalMoments { mean, std_dev: var.sqrt() }
}

/// Mean of `min(A, B)` for independent normals `A` and `B`.
pub fn min_of_normals_mean<T: Real>(a: NormalMoments<T>, b: NormalMoments<T>) -> T {
    let theta2 = a.variance() + b.variance();
    if theta2 <= T::zero() {
        return a.mean().min(b.mean());
    }
    let theta = theta2.sqrt();
    let d = (a.mean() - b.mean()) / theta;
    a.mean() * std_normal_cdf(-d) + b.mean() * std_normal_cdf(d) - theta * std_normal_pdf(d)
}

// ---------------------------------------------------------------------------
// Cody's rational approximation of erf/erfc (W. J. Cody, 1969).
// ---------------------------------------------------------------------------

const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERFC_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERFC_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERFC_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERFC_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// `exp(-y^2)` split to preserve accuracy for large `y`.
fn exp_neg_sq(y: f64) -> f64 {
    let ysq = (y * 16.0).floor() / 16.0;
    (-ysq * ysq).exp() * (-(y - ysq) * (y + ysq)).exp()
}

fn erfc_mid(y: f64) -> f64 {
    let mut num = ERFC_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERFC_C[i]) * y;
        den = (den + ERFC_D[i]) * y;
    }
    exp_neg_sq(y) * (num + ERFC_C[7]) / (den + ERFC_D[7])
}

fn erfc_large(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let mut num = ERFC_P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + ERFC_P[i]) * z;
        den = (den + ERFC_Q[i]) * z;
    }
    let r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
    exp_neg_sq(y) * (INV_SQRT_PI - r) / y
}

pub(crate) fn erfc(x: f64) -> f64 {
    let y = x.abs();
    let res = if y <= 0.46875 {
        1.0 - erf_small(y)
    } else if y <= 4.0 {
        erfc_mid(y)
    } else if y < 26.6 {
        erfc_large(y)
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - res
    } else {
        res
    }
}

// Acklam's inverse-normal rational approximation (relative error < 1.2e-9).
const INV_A: [f64; 6] = [
    -3.969683028665376e1,
    2.209460984245205e2,
    -2.759285104469687e2,
    1.383577518672690e2,
    -3.066479806614716e1,
    2.506628277459239e0,
];
const INV_B: [f64; 5] = [
    -5.447609879822406e1,
    1.615858368580409e2,
    -1.556989798598866e2,
    6.680131188771972e1,
    -1.328068155288572e1,
];
const INV_C: [f64; 6] = [
    -7.784894002430293e-3,
    -3.223964580411365e-1,
    -2.400758277161838e0,
    -2.549732539343734e0,
    4.374664141464968e0,
    2.938163982698783e0,
];
const INV_D: [f64; 4] = [
    7.784695709041462e-3,
    3.224671290700398e-1,
    2.445134137142996e0,
    3.754408661907416e0,
];
const P_LOW: f64 = 0.02425;

fn acklam_inverse(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((INV_C[0] * q + INV_C[1]) * q + INV_C[2]) * q + INV_C[3]) * q + INV_C[4]) * q
            + INV_C[5])
            / ((((INV_D[0] * q + INV_D[1]) * q + INV_D[2]) * q + INV_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((INV_A[0] * r + INV_A[1]) * r + INV_A[2]) * r + INV_A[3]) * r + INV_A[4]) * r
            + INV_A[5])
            * q
            / (((((INV_B[0] * r + INV_B[1]) * r + INV_B[2]) * r + INV_B[3]) * r + INV_B[4]) * r
                + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((INV_C[0] * q + INV_C[1]) * q + INV_C[2]) * q + INV_C[3]) * q + INV_C[4]) * q
            + INV_C[5])
            / ((((INV_D[0] * q + INV_D[1]) * q + INV_D[2]) * q + INV_D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent erfc oracle: power series for small arguments, Lentz
    /// continued fraction for the tail.
    fn erfc_oracle(x: f64) -> f64 {
        if x < 0.0 {
            return 2.0 - erfc_oracle(-x);
        }
        if x < 2.0 {
            // erf series: 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
            let mut term = x;
            let mut sum = x;
            let mut n = 0usize;
            while term.abs() > 1e-20 * sum.abs().max(1.0) {
                n += 1;
                term *= -x * x / n as f64;
                sum += term / (2 * n + 1) as f64;
            }
            1.0 - 2.0 * INV_SQRT_PI * sum
        } else {
            // erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
            let mut f = x;
            for k in (1..=200).rev() {
                f = x + (k as f64 / 2.0) / f;
            }
            (-x * x).exp() * INV_SQRT_PI / f
        }
    }

    #[test]
    fn erfc_matches_series_and_continued_fraction_oracle() {
        let mut x = -8.0;
        while x <= 8.0 {
            let got = erfc(x);
            let want = erfc_oracle(x);
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            if want > 0.0 {
                assert!(((got - want) / want).abs() < 1e-9, "rel err at {x}");
            }
            x += 0.0137;
        }
        // deep tail stays finite and positive
        assert!(erfc(25.0) > 0.0);
        assert_eq!(erfc(27.0), 0.0);
    }

    #[test]
    fn cdf_symmetry_at_zero() {
        assert_eq!(std_normal_cdf(0.0_f64), 0.5);
        assert_eq!(std_normal_sf(0.0_f64), 0.5);
    }

    #[test]
    fn cdf_at_1_96() {
        // high-precision oracle value via the continued-fraction erfc
        let want = 1.0 - 0.5 * erfc_oracle(1.96 * FRAC_1_SQRT_2);
        assert_abs_diff_eq!(std_normal_cdf(1.96_f64), want, epsilon = 1e-12);
        assert_abs_diff_eq!(std_normal_cdf(1.96_f64), 0.975002, epsilon = 1e-6);
    }

    #[test]
    fn quantile_at_0_9_matches_bisection() {
        // bisection oracle on the cdf
        let (mut lo, mut hi) = (0.0_f64, 4.0_f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if std_normal_cdf(mid) < 0.9 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = 0.5 * (lo + hi);
        let got = std_normal_quantile(0.9_f64).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        assert_abs_diff_eq!(got, 1.281552, epsilon = 1e-6);
    }

    #[test]
    fn quantile_inverts_cdf_within_1e9() {
        let mut p = 1e-12_f64;
        while p < 1.0 - 1e-12 {
            let x = std_normal_quantile(p).unwrap();
            assert_abs_diff_eq!(std_normal_cdf(x), p, epsilon = 1e-9);
            p = if p < 1e-3 {
                p * 3.7
            } else if p < 0.999 {
                p + 1e-3
            } else {
                1.0 - (1.0 - p) * 0.37
            };
        }
        let x = std_normal_quantile(1.0 - 1e-12_f64).unwrap();
        assert_abs_diff_eq!(std_normal_cdf(x), 1.0 - 1e-12, epsilon = 1e-9);
    }

    #[test]
    fn quantile_rejects_boundary() {
        assert!(std_normal_quantile(0.0_f64).is_err());
        assert!(std_normal_quantile(1.0_f64).is_err());
        assert!(std_normal_quantile(-0.1_f64).is_err());
    }

    #[test]
    fn max_of_equal_normals() {
        let m = NormalMoments::new(3.0_f64, 2.0).unwrap();
        let r = max_of_normals_moments(m, m);
        // mean + sigma * sqrt(2) * phi(0)
        assert_abs_diff_eq!(r.mean(), 3.0 + 0.564190 * 2.0, epsilon = 1e-5);
    }

    #[test]
    fn max_of_degenerate_normals_is_max_of_means() {
        let a = NormalMoments::degenerate(10.0_f64);
        let b = NormalMoments::degenerate(1.0_f64);
        let r = max_of_normals_moments(a, b);
        assert_eq!(r.mean(), 10.0);
        assert_eq!(r.std_dev(), 0.0);
        assert_eq!(min_of_normals_mean(NormalMoments::degenerate(1.0_f64), b), 1.0);
    }

    #[test]
    fn max_and_min_match_sampling_oracle() {
        // a = (5, 1), b = (5, 3): compare against 1e6 paired normal draws
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut normal = || {
            // Box-Muller
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let n = 1_000_000;
        let (mut s_max, mut s2_max, mut s_min) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let a = 5.0 + normal();
            let b = 5.0 + 3.0 * normal();
            let mx = a.max(b);
            s_max += mx;
            s2_max += mx * mx;
            s_min += a.min(b);
        }
        let mc_mean = s_max / n as f64;
        let mc_std = (s2_max / n as f64 - mc_mean * mc_mean).sqrt();
        let mc_min = s_min / n as f64;

        let a = NormalMoments::new(5.0_f64, 1.0).unwrap();
        let b = NormalMoments::new(5.0_f64, 3.0).unwrap();
        let mx = max_of_normals_moments(a, b);
        assert!((mx.mean() - mc_mean).abs() / mc_mean < 0.02);
        assert!((mx.std_dev() - mc_std).abs() / mc_std < 0.02);
        let mn = min_of_normals_mean(a, b);
        assert!((mn - mc_min).abs() / mc_min.abs() < 0.02);
    }

    #[test]
    fn max_plus_min_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = NormalMoments::new(rng.gen::<f64>() * 40.0 - 20.0, rng.gen::<f64>() * 9.0)
                .unwrap();
            let b = NormalMoments::new(rng.gen::<f64>() * 40.0 - 20.0, rng.gen::<f64>() * 9.0)
                .unwrap();
            let sum = max_of_normals_moments(a, b).mean() + min_of_normals_mean(a, b);
            assert_abs_diff_eq!(sum, a.mean() + b.mean(), epsilon = 1e-12);
        }
    }

    #[test]
    fn moments_validate_inputs() {
        assert!(NormalMoments::new(f64::NAN, 1.0).is_err());
        assert!(NormalMoments::new(0.0, -1.0).is_err());
        assert!(NormalMoments::new(0.0_f32, 1.0).is_ok());
    }

    #[test]
    fn works_in_f32() {
        let c: f32 = std_normal_cdf(0.0_f32);
        assert_eq!(c, 0.5);
        let q: f32 = std_normal_quantile(0.9_f32).unwrap();
        assert!((q - 1.2815516).abs() < 1e-5);
    }
}
