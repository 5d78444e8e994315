//! Per-session normal approximations of the transmission counts.
//!
//! Each session's count is a (possibly compound) negative-binomial trial
//! total approximated as normal with `mu = load/(1-p)` and
//! `sigma^2 = load*p/(1-p)^2`, where the load is the expected number of
//! packets the session must deliver. Coded-phase counts use the
//! order-statistics moments of the maximum of the two per-receiver laws, and
//! the number of XOR pairs enters through the mean of the minimum of the two
//! encodable-set sizes.

use super::ModelError;
use crate::channel::{validate_profile, FrameConfig, LinkProfile};
use crate::sim::SchemeId;
use crate::stats::{
    max_of_normals_moments, min_of_normals_mean, nb_normal_approx_load,
};
use crate::NormalMoments;

/// Session-by-session normal approximations; the total has additive mean and
/// variance since the sessions run independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMoments {
    pub session1: NormalMoments,
    pub session2: NormalMoments,
    pub session3: NormalMoments,
    pub total: NormalMoments,
}

impl SchemeMoments {
    fn compose(
        session1: NormalMoments,
        session2: NormalMoments,
        session3: NormalMoments,
    ) -> Self {
        let total = NormalMoments::sum_of(&[session1, session2, session3]);
        Self { session1, session2, session3, total }
    }
}

pub fn scheme_moments(
    scheme: SchemeId,
    profile: &LinkProfile,
    config: &FrameConfig,
) -> Result<SchemeMoments, ModelError> {
    let profile = validate_profile(*profile, config)?;
    let np = f64::from(config.n_primary);
    let ns = f64::from(config.n_secondary);
    let lost_primary = np * profile.primary_loss_at_pr();

    let session1 = nb_normal_approx_load(np, profile.p1 * profile.q)?;

    match scheme {
        SchemeId::Arq => {
            let session2 = nb_normal_approx_load(lost_primary, profile.p21)?;
            let session3 = nb_normal_approx_load(ns, profile.p2)?;
            Ok(SchemeMoments::compose(session1, session2, session3))
        }
        SchemeId::Snc => {
            let session2 = NormalMoments::degenerate(ns);
            let lost_secondary = ns * profile.p2;
            // encodable-set sizes are (approximately normal) binomial counts
            let enc_p = NormalMoments::new(
                lost_primary * (1.0 - profile.p12),
                (lost_primary * profile.p12 * (1.0 - profile.p12)).sqrt(),
            )?;
            let enc_s = NormalMoments::new(
                lost_secondary * (1.0 - profile.p21),
                (lost_secondary * profile.p21 * (1.0 - profile.p21)).sqrt(),
            )?;
            let pairs = min_of_normals_mean(enc_p, enc_s).max(0.0);
            let per_packet = max_of_normals_moments(
                nb_normal_approx_load(1.0, profile.p21)?,
                nb_normal_approx_load(1.0, profile.p2)?,
            );
            let coded = NormalMoments::new(
                pairs * per_packet.mean(),
                (pairs * per_packet.variance()).sqrt(),
            )?;
            let residual_p = nb_normal_approx_load((lost_primary - pairs).max(0.0), profile.p21)?;
            let residual_s = nb_normal_approx_load((lost_secondary - pairs).max(0.0), profile.p2)?;
            let session3 = NormalMoments::sum_of(&[coded, residual_p, residual_s]);
            Ok(SchemeMoments::compose(session1, session2, session3))
        }
        SchemeId::Anc => {
            let session2 = NormalMoments::degenerate(ns);
            let enc_p_load = lost_primary * (1.0 - profile.p12);
            let enc_s_load = ns * profile.p2 * (1.0 - profile.p21);
            let coded = max_of_normals_moments(
                nb_normal_approx_load(enc_p_load, profile.p21)?,
                nb_normal_approx_load(enc_s_load, profile.p2)?,
            );
            let residual_p =
                nb_normal_approx_load(lost_primary * profile.p12, profile.p21)?;
            let residual_s = nb_normal_approx_load(ns * profile.p2 * profile.p21, profile.p2)?;
            let session3 = NormalMoments::sum_of(&[coded, residual_p, residual_s]);
            Ok(SchemeMoments::compose(session1, session2, session3))
        }
    }
}
