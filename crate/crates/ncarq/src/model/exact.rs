//! Exact (summation-based) expectations for the retransmission session, the
//! common upper bound, and the absorbing-chain oracle for the coded phase.

use super::ModelError;
use crate::channel::{validate_profile, FrameConfig, LinkProfile};
use crate::sim::SchemeId;
use crate::stats::broadcast_efficiency_2;

/// Expected stop-and-wait slots for `load` packets over a link with loss
/// probability `loss`; zero load costs nothing even on a blocked link.
fn geometric_cost(load: f64, loss: f64) -> f64 {
    if load == 0.0 {
        0.0
    } else {
        load / (1.0 - loss)
    }
}

/// Binomial pmf table over `0..=n` successes with success probability `p`.
fn binomial_pmf(n: u32, p: f64) -> Vec<f64> {
    let n = n as usize;
    let mut table = vec![0.0; n + 1];
    if p <= 0.0 {
        table[0] = 1.0;
        return table;
    }
    if p >= 1.0 {
        table[n] = 1.0;
        return table;
    }
    table[0] = (1.0 - p).powi(n as i32);
    let odds = p / (1.0 - p);
    for k in 0..n {
        table[k + 1] = table[k] * ((n - k) as f64 / (k + 1) as f64) * odds;
    }
    table
}

/// Expected total frame size of the ARQ scheme:
/// `Np/(1-p1q) + Np p1(1-q)/((1-p1q)(1-p21)) + Ns/(1-p2)`.
pub fn expected_frame_arq(profile: &LinkProfile, config: &FrameConfig) -> Result<f64, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = f64::from(config.n_primary);
    let ns = f64::from(config.n_secondary);
    Ok(geometric_cost(np, profile.p1 * profile.q)
        + geometric_cost(np * profile.primary_loss_at_pr(), profile.p21)
        + geometric_cost(ns, profile.p2))
}

/// Common upper bound on the expected retransmission-session size of both
/// network-coding schemes; it equals the no-coding cost
/// `Np p1(1-q)/((1-p1q)(1-p21)) + Ns p2/(1-p2)`.
pub fn retransmission_bound(
    profile: &LinkProfile,
    config: &FrameConfig,
) -> Result<f64, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = f64::from(config.n_primary);
    let ns = f64::from(config.n_secondary);
    Ok(geometric_cost(np * profile.primary_loss_at_pr(), profile.p21)
        + geometric_cost(ns * profile.p2, profile.p2))
}

/// Exact expected retransmission-session size of the SNC scheme: the double
/// sum over joint loss counts of the conditional cost, itself a double sum
/// over the encodable subset sizes.
pub fn expected_b3_snc(profile: &LinkProfile, config: &FrameConfig) -> Result<f64, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = config.n_primary;
    let ns = config.n_secondary;
    let rho = profile.primary_loss_at_pr();
    let lost_p = binomial_pmf(np, rho);
    let lost_s = binomial_pmf(ns, profile.p2);
    let mu_bc = if np > 0 && ns > 0 && profile.p21 < 1.0 && profile.p2 < 1.0 {
        broadcast_efficiency_2(profile.p21, profile.p2)?
    } else {
        0.0 // no pair can form, the coefficient below is always zero
    };
    let overheard_p: Vec<Vec<f64>> =
        (0..=np).map(|kp| binomial_pmf(kp, 1.0 - profile.p12)).collect();
    let overheard_s: Vec<Vec<f64>> =
        (0..=ns).map(|ks| binomial_pmf(ks, 1.0 - profile.p21)).collect();

    let mut total = 0.0;
    for (kp, &w_kp) in lost_p.iter().enumerate() {
        if w_kp == 0.0 {
            continue;
        }
        for (ks, &w_ks) in lost_s.iter().enumerate() {
            let w = w_kp * w_ks;
            if w == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for (i, &pi) in overheard_p[kp].iter().enumerate() {
                for (j, &pj) in overheard_s[ks].iter().enumerate() {
                    let k_min = i.min(j);
                    inner += pi
                        * pj
                        * (k_min as f64 * mu_bc
                            + geometric_cost((kp - k_min) as f64, profile.p21)
                            + geometric_cost((ks - k_min) as f64, profile.p2));
                }
            }
            total += w * inner;
        }
    }
    Ok(total)
}

/// Polynomial-expanded form of [`expected_b3_snc`]: per loss pair the cost is
/// `kp/(1-p21) + ks/(1-p2) - E[min]/(1-p2*p21)` with `E[min]` summed from the
/// survival functions of the two conditional overhearing binomials.
pub fn expected_b3_snc_expanded(
    profile: &LinkProfile,
    config: &FrameConfig,
) -> Result<f64, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = config.n_primary;
    let ns = config.n_secondary;
    let rho = profile.primary_loss_at_pr();
    let lost_p = binomial_pmf(np, rho);
    let lost_s = binomial_pmf(ns, profile.p2);

    // survival[k][t] = P(count > t) for count ~ Bin(k, 1 - p)
    let survival = |k_max: u32, p_overhear: f64| -> Vec<Vec<f64>> {
        (0..=k_max)
            .map(|k| {
                let pmf = binomial_pmf(k, p_overhear);
                let mut surv = vec![0.0; k as usize + 1];
                let mut acc = 0.0;
                for t in (0..=k as usize).rev() {
                    surv[t] = acc; // P(count > t)
                    acc += pmf[t];
                }
                surv
            })
            .collect()
    };
    let surv_p = survival(np, 1.0 - profile.p12);
    let surv_s = survival(ns, 1.0 - profile.p21);

    let pair_gain = 1.0 - profile.p2 * profile.p21;
    let mut total = 0.0;
    for (kp, &w_kp) in lost_p.iter().enumerate() {
        if w_kp == 0.0 {
            continue;
        }
        for (ks, &w_ks) in lost_s.iter().enumerate() {
            let w = w_kp * w_ks;
            if w == 0.0 {
                continue;
            }
            // E[min(i, j)] = sum_t P(i > t) P(j > t)
            let mut e_min = 0.0;
            for t in 0..kp.min(ks) {
                e_min += surv_p[kp].get(t).copied().unwrap_or(0.0)
                    * surv_s[ks].get(t).copied().unwrap_or(0.0);
            }
            let mut cost = geometric_cost(kp as f64, profile.p21)
                + geometric_cost(ks as f64, profile.p2);
            if e_min > 0.0 {
                cost -= e_min / pair_gain;
            }
            total += w * cost;
        }
    }
    Ok(total)
}

/// Exact expected retransmission-session size of the ANC scheme: the double
/// sum over encodable counts of the tail-truncated series for the coded
/// phase, plus the exact means of the two never-overheard residual loads.
pub fn expected_b3_anc(profile: &LinkProfile, config: &FrameConfig) -> Result<f64, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = f64::from(config.n_primary);
    let ns = f64::from(config.n_secondary);
    let rho = profile.primary_loss_at_pr();
    let enc_p = binomial_pmf(config.n_primary, rho * (1.0 - profile.p12));
    let enc_s = binomial_pmf(config.n_secondary, profile.p2 * (1.0 - profile.p21));

    let mut coded = 0.0;
    for (kp, &w_kp) in enc_p.iter().enumerate() {
        if w_kp == 0.0 {
            continue;
        }
        for (ks, &w_ks) in enc_s.iter().enumerate() {
            let w = w_kp * w_ks;
            if w == 0.0 {
                continue;
            }
            coded += w * coded_phase_series(kp as u32, ks as u32, profile.p21, profile.p2);
        }
    }
    Ok(coded
        + geometric_cost(np * rho * profile.p12, profile.p21)
        + geometric_cost(ns * profile.p2 * profile.p21, profile.p2))
}

/// Expected coded-phase slots from the series `sum_k k * P{max(X1, X2) = k}`
/// over the exact negative-binomial laws of the two receivers' completion
/// times, truncated once the remaining tail mass is negligible.
pub fn coded_phase_series(k_p: u32, k_s: u32, p_pr: f64, p_sr: f64) -> f64 {
    assert!(
        (0.0..1.0).contains(&p_pr) && (0.0..1.0).contains(&p_sr),
        "loss probabilities must lie in [0, 1)"
    );
    if k_p == 0 && k_s == 0 {
        return 0.0;
    }
    if k_p == 0 {
        return f64::from(k_s) / (1.0 - p_sr);
    }
    if k_s == 0 {
        return f64::from(k_p) / (1.0 - p_pr);
    }

    // Advance an NB(total trials; n successes, loss p) pmf/cdf pair to `k`.
    let scan = |n: u32, p: f64, k: u64| -> (f64, f64) {
        let mut pmf = (1.0 - p).powi(n as i32);
        let mut cdf = pmf;
        let mut t = u64::from(n);
        while t < k {
            pmf *= p * t as f64 / (t + 1 - u64::from(n)) as f64;
            t += 1;
            cdf += pmf;
        }
        (pmf, cdf)
    };

    let start = u64::from(k_p.max(k_s));
    let (mut pmf1, mut cdf1) = scan(k_p, p_pr, start);
    let (mut pmf2, mut cdf2) = scan(k_s, p_sr, start);

    let mut sum = 0.0;
    let mut k = start;
    loop {
        // P{max = k} = f2(k) F1(k) + f1(k) F2(k-1)
        let term = pmf2 * cdf1 + pmf1 * (cdf2 - pmf2);
        sum += k as f64 * term;
        if 1.0 - cdf1 * cdf2 < 1e-14 {
            break;
        }
        pmf1 *= p_pr * k as f64 / (k + 1 - u64::from(k_p)) as f64;
        pmf2 *= p_sr * k as f64 / (k + 1 - u64::from(k_s)) as f64;
        k += 1;
        cdf1 += pmf1;
        cdf2 += pmf2;
    }
    sum
}

/// Exact expected coded-phase slots for `k_p` pending packets at the PR and
/// `k_s` at the SR.
///
/// ANC is evaluated as an absorbing chain on the pending counts `(a, b)`: one
/// slot decrements `a` with probability `1 - p_pr` (when `a > 0`) and `b`
/// with probability `1 - p_sr` (when `b > 0`), independently. SNC repeats
/// each of the `min(k_p, k_s)` fixed pairs until both receivers hold it and
/// sends the surplus individually. ARQ carries no coded phase and pays the
/// plain per-receiver stop-and-wait cost.
pub fn coded_phase_exact(scheme: SchemeId, k_p: u32, k_s: u32, p_pr: f64, p_sr: f64) -> f64 {
    assert!(
        (0.0..1.0).contains(&p_pr) && (0.0..1.0).contains(&p_sr),
        "loss probabilities must lie in [0, 1)"
    );
    match scheme {
        SchemeId::Arq => {
            geometric_cost(f64::from(k_p), p_pr) + geometric_cost(f64::from(k_s), p_sr)
        }
        SchemeId::Snc => {
            let k_min = k_p.min(k_s);
            let mu_bc = if k_min > 0 {
                broadcast_efficiency_2(p_pr, p_sr).expect("loss probabilities validated above")
            } else {
                0.0
            };
            f64::from(k_min) * mu_bc
                + geometric_cost(f64::from(k_p - k_min), p_pr)
                + geometric_cost(f64::from(k_s - k_min), p_sr)
        }
        SchemeId::Anc => {
            let cols = k_s as usize + 1;
            let mut table = vec![0.0f64; (k_p as usize + 1) * cols];
            let joint = 1.0 - p_pr * p_sr;
            for a in 0..=k_p as usize {
                for b in 0..=k_s as usize {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    table[a * cols + b] = if a == 0 {
                        b as f64 / (1.0 - p_sr)
                    } else if b == 0 {
                        a as f64 / (1.0 - p_pr)
                    } else {
                        (1.0 + (1.0 - p_pr) * (1.0 - p_sr) * table[(a - 1) * cols + b - 1]
                            + (1.0 - p_pr) * p_sr * table[(a - 1) * cols + b]
                            + p_pr * (1.0 - p_sr) * table[a * cols + b - 1])
                            / joint
                    };
                }
            }
            table[k_p as usize * cols + k_s as usize]
        }
    }
}
