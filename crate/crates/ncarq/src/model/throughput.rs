//! Throughput reports, outage-constrained cap selection and secondary-load
//! sizing.

use super::exact::{expected_b3_anc, expected_b3_snc, expected_frame_arq};
use super::moments::scheme_moments;
use super::ModelError;
use crate::channel::{
    validate_profile, FrameConfig, LinkProfile, TruncationPolicy, ValidationError,
};
use crate::sim::SchemeId;
use crate::stats::{std_normal_quantile, std_normal_sf, truncate_upper, StatsError};
use crate::NormalMoments;

/// Frame-size regime: adaptive (unbounded, lossless) or truncated (capped,
/// lossy with outage).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Afs,
    Tfs,
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Afs => "afs",
            Mode::Tfs => "tfs",
        })
    }
}

impl core::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "afs" => Ok(Mode::Afs),
            "tfs" => Ok(Mode::Tfs),
            other => Err(format!("unknown mode `{other}` (expected afs or tfs)")),
        }
    }
}

/// Packets delivered per resource unit for both systems, with the mean frame
/// size the ratio is taken against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    pub mode: Mode,
    pub eta_primary: f64,
    pub eta_secondary: f64,
    pub mean_frame: f64,
    /// Analytic outage probability; only meaningful in the truncated regime.
    pub outage: Option<f64>,
}

/// Analytic throughput of a scheme in the given regime.
///
/// In the adaptive regime the mean frame size combines the Session 1 mean,
/// the secondary session and the exact retransmission expectation. In the
/// truncated regime it is the mean of the upper-truncated normal fit and the
/// outage follows the Q-form tail of the untruncated approximation.
pub fn throughput(
    mode: Mode,
    scheme: SchemeId,
    profile: &LinkProfile,
    config: &FrameConfig,
    policy: &TruncationPolicy,
) -> Result<ThroughputReport, ModelError> {
    let profile = validate_profile(*profile, config)?;
    policy.validate_against(config)?;
    let np = f64::from(config.n_primary);
    let ns = f64::from(config.n_secondary);
    match mode {
        Mode::Afs => {
            let mean_frame = match scheme {
                SchemeId::Arq => expected_frame_arq(&profile, config)?,
                SchemeId::Snc => {
                    session1_mean(&profile, np) + ns + expected_b3_snc(&profile, config)?
                }
                SchemeId::Anc => {
                    session1_mean(&profile, np) + ns + expected_b3_anc(&profile, config)?
                }
            };
            Ok(ThroughputReport {
                mode,
                eta_primary: np / mean_frame,
                eta_secondary: ns / mean_frame,
                mean_frame,
                outage: None,
            })
        }
        Mode::Tfs => {
            let cap = policy.cap().ok_or(ModelError::CapRequired)? as f64;
            let total = scheme_moments(scheme, &profile, config)?.total;
            let (mean_frame, outage) = if total.std_dev() == 0.0 {
                // deterministic frame: outage is a step function at the mean
                if total.mean() <= cap {
                    (total.mean(), 0.0)
                } else {
                    return Err(ModelError::Stats(StatsError::TruncationUnderflow {
                        cap,
                        mean: total.mean(),
                        std_dev: 0.0,
                    }));
                }
            } else {
                let outage = std_normal_sf((cap - total.mean()) / total.std_dev());
                (truncate_upper(total, cap)?.mean(), outage)
            };
            Ok(ThroughputReport {
                mode,
                eta_primary: np / mean_frame,
                eta_secondary: ns / mean_frame,
                mean_frame,
                outage: Some(outage),
            })
        }
    }
}

fn session1_mean(profile: &LinkProfile, np: f64) -> f64 {
    if np == 0.0 {
        0.0
    } else {
        np / (1.0 - profile.p1 * profile.q)
    }
}

/// Smallest cap holding the Q-form outage at `target`:
/// `cap = mean + std_dev * Qinv(target)`.
pub fn cap_for_outage(moments: NormalMoments, target: f64) -> Result<f64, ModelError> {
    if moments.std_dev() <= 0.0 {
        return Err(ModelError::Stats(StatsError::DegenerateStdDev));
    }
    let q_inv = -std_normal_quantile(target)?;
    Ok(moments.mean() + moments.std_dev() * q_inv)
}

/// Largest secondary load whose analytic outage stays within `target_outage`
/// for the given cap. The Q-form outage is nondecreasing in the load, so a
/// binary search over the feasible range suffices; a defensive boundary walk
/// guards the degenerate corners.
pub fn size_secondary_load(
    scheme: SchemeId,
    profile: &LinkProfile,
    n_primary: u32,
    cap: u64,
    target_outage: f64,
) -> Result<u32, ModelError> {
    if !(target_outage > 0.0 && target_outage < 1.0) {
        return Err(ModelError::Validation(ValidationError::TargetOutageOutOfRange {
            value: target_outage,
        }));
    }
    if cap < u64::from(n_primary) + 1 {
        return Err(ModelError::Validation(ValidationError::CapBelowWorkload {
            cap,
            packets: u64::from(n_primary) + 1,
        }));
    }
    let hi = (cap - u64::from(n_primary)).min(u64::from(u32::MAX)) as u32;

    let outage_at = |ns: u32| -> Result<f64, ModelError> {
        if n_primary == 0 && ns == 0 {
            return Ok(0.0);
        }
        let config = FrameConfig { n_primary, n_secondary: ns };
        let total = match scheme_moments(scheme, profile, &config) {
            Ok(m) => m.total,
            // a load this large can never finish; outage certain
            Err(ModelError::Validation(ValidationError::NonTerminating { .. })) if ns > 0 => {
                return Ok(f64::INFINITY)
            }
            Err(e) => return Err(e),
        };
        Ok(if total.std_dev() == 0.0 {
            if total.mean() <= cap as f64 {
                0.0
            } else {
                1.0
            }
        } else {
            std_normal_sf((cap as f64 - total.mean()) / total.std_dev())
        })
    };

    if outage_at(0)? > target_outage {
        return Err(ModelError::Infeasible { n_primary, cap, target_outage });
    }
    let mut best = if outage_at(hi)? <= target_outage {
        hi
    } else {
        let (mut lo, mut hi_bound) = (0u32, hi);
        while hi_bound - lo > 1 {
            let mid = lo + (hi_bound - lo) / 2;
            if outage_at(mid)? <= target_outage {
                lo = mid;
            } else {
                hi_bound = mid;
            }
        }
        lo
    };
    while best < hi && outage_at(best + 1)? <= target_outage {
        best += 1;
    }
    while best > 0 && outage_at(best)? > target_outage {
        best -= 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> (LinkProfile, FrameConfig) {
        (LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1), FrameConfig::new(50, 30).unwrap())
    }

    #[test]
    fn lossless_adaptive_throughput_splits_by_load() {
        let profile = LinkProfile::new(0.0, 0.0, 0.0, 0.0, 0.0);
        let config = FrameConfig::new(50, 30).unwrap();
        for scheme in SchemeId::ALL {
            let r =
                throughput(Mode::Afs, scheme, &profile, &config, &TruncationPolicy::unbounded())
                    .unwrap();
            assert_abs_diff_eq!(r.eta_primary, 50.0 / 80.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.eta_secondary, 30.0 / 80.0, epsilon = 1e-12);
            assert_eq!(r.outage, None);
        }
    }

    #[test]
    fn arq_adaptive_reference_throughput() {
        let (profile, config) = reference();
        let r = throughput(Mode::Afs, SchemeId::Arq, &profile, &config, &TruncationPolicy::unbounded())
            .unwrap();
        assert_abs_diff_eq!(r.eta_primary, 0.3781, epsilon = 1e-4);
        assert_abs_diff_eq!(r.eta_secondary, 0.2269, epsilon = 1e-4);
        assert_abs_diff_eq!(r.mean_frame, 132.2368, epsilon = 1e-4);
    }

    #[test]
    fn arq_truncated_outage_matches_the_q_form() {
        let profile = LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1);
        let config = FrameConfig::new(50, 19).unwrap();
        let r = throughput(
            Mode::Tfs,
            SchemeId::Arq,
            &profile,
            &config,
            &TruncationPolicy::capped(120),
        )
        .unwrap();
        // moments (113.9035, 5.5931): Q(1.09001)
        let m = scheme_moments(SchemeId::Arq, &profile, &config).unwrap().total;
        let want = std_normal_sf((120.0 - m.mean()) / m.std_dev());
        assert_abs_diff_eq!(r.outage.unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(r.outage.unwrap(), 0.13786, epsilon = 1e-4);
        assert!(r.mean_frame < m.mean());
    }

    #[test]
    fn tfs_requires_a_bounded_cap() {
        let (profile, config) = reference();
        assert!(matches!(
            throughput(Mode::Tfs, SchemeId::Arq, &profile, &config, &TruncationPolicy::unbounded()),
            Err(ModelError::CapRequired)
        ));
    }

    #[test]
    fn cap_for_outage_reference_values() {
        let m = NormalMoments::new(113.9, 5.59).unwrap();
        // target 0.5 puts the cap at the mean
        assert_abs_diff_eq!(cap_for_outage(m, 0.5).unwrap(), 113.9, epsilon = 1e-9);
        assert_abs_diff_eq!(cap_for_outage(m, 0.1).unwrap(), 121.06, epsilon = 5e-3);
        assert!(cap_for_outage(NormalMoments::degenerate(5.0), 0.1).is_err());
    }

    #[test]
    fn cap_for_outage_round_trips() {
        let m = NormalMoments::new(80.0, 6.5).unwrap();
        for target in [0.01, 0.1, 0.25, 0.5, 0.9] {
            let cap = cap_for_outage(m, target).unwrap();
            let outage = std_normal_sf((cap - m.mean()) / m.std_dev());
            assert_abs_diff_eq!(outage, target, epsilon = 1e-9);
        }
    }

    #[test]
    fn lossless_sizing_fills_the_cap() {
        let profile = LinkProfile::new(0.0, 0.0, 0.0, 0.0, 0.0);
        for scheme in SchemeId::ALL {
            for target in [0.01, 0.1, 0.5] {
                assert_eq!(size_secondary_load(scheme, &profile, 50, 120, target).unwrap(), 70);
            }
        }
    }

    #[test]
    fn sizing_reference_profile() {
        let profile = LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1);
        // Q-form boundaries of the per-scheme normal approximations.
        assert_eq!(size_secondary_load(SchemeId::Arq, &profile, 50, 120, 0.1).unwrap(), 18);
        assert_eq!(size_secondary_load(SchemeId::Snc, &profile, 50, 120, 0.1).unwrap(), 24);
        assert_eq!(size_secondary_load(SchemeId::Anc, &profile, 50, 120, 0.1).unwrap(), 29);
    }

    #[test]
    fn sizing_boundary_is_tight() {
        let profile = LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1);
        for scheme in SchemeId::ALL {
            let ns = size_secondary_load(scheme, &profile, 50, 120, 0.1).unwrap();
            let outage = |n: u32| {
                let config = FrameConfig::new(50, n).unwrap();
                let m = scheme_moments(scheme, &profile, &config).unwrap().total;
                std_normal_sf((120.0 - m.mean()) / m.std_dev())
            };
            assert!(outage(ns) <= 0.1);
            assert!(outage(ns + 1) > 0.1);
        }
    }

    #[test]
    fn sizing_is_monotone_in_the_cap() {
        let profile = LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1);
        let mut last = 0;
        for cap in [90u64, 100, 110, 120, 130, 140] {
            let ns = size_secondary_load(SchemeId::Arq, &profile, 50, cap, 0.1).unwrap_or(0);
            assert!(ns >= last, "cap {cap}: {ns} < {last}");
            last = ns;
        }
    }

    #[test]
    fn outage_is_strictly_decreasing_in_the_cap() {
        let (profile, config) = reference();
        let mut last = 1.0;
        for cap in [100u64, 110, 120, 130, 140, 160] {
            let r = throughput(
                Mode::Tfs,
                SchemeId::Arq,
                &profile,
                &config,
                &TruncationPolicy::capped(cap),
            )
            .unwrap();
            let outage = r.outage.unwrap();
            assert!(outage < last);
            last = outage;
        }
    }

    #[test]
    fn infeasible_target_is_reported() {
        let profile = LinkProfile::new(0.9, 0.4, 0.3, 0.2, 0.5);
        // 30 primary packets cannot fit a cap of 31 at any useful outage
        assert!(matches!(
            size_secondary_load(SchemeId::Arq, &profile, 30, 31, 0.05),
            Err(ModelError::Infeasible { .. })
        ));
        assert!(matches!(
            size_secondary_load(SchemeId::Arq, &profile, 30, 20, 0.05),
            Err(ModelError::Validation(ValidationError::CapBelowWorkload { .. }))
        ));
    }
}
