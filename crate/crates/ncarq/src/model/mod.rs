//! Closed-form and semi-analytic evaluation of frame-size expectations,
//! normal approximations, retransmission bounds and outage-constrained load
//! sizing, plus an exact absorbing-chain oracle for the coded phase.

mod exact;
mod moments;
mod throughput;

pub use exact::{
    coded_phase_exact, coded_phase_series, expected_b3_anc, expected_b3_snc,
    expected_b3_snc_expanded, expected_frame_arq, retransmission_bound,
};
pub use moments::{scheme_moments, SchemeMoments};
pub use throughput::{cap_for_outage, size_secondary_load, throughput, Mode, ThroughputReport};

use crate::channel::ValidationError;
use crate::stats::StatsError;

/// Errors from the analytic model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    Validation(ValidationError),
    Stats(StatsError),
    /// Truncated-frame analysis needs a bounded cap.
    CapRequired,
    /// Even an empty secondary load violates the outage target.
    Infeasible { n_primary: u32, cap: u64, target_outage: f64 },
}

impl From<ValidationError> for ModelError {
    fn from(e: ValidationError) -> Self {
        ModelError::Validation(e)
    }
}

impl From<StatsError> for ModelError {
    fn from(e: StatsError) -> Self {
        ModelError::Stats(e)
    }
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModelError::Validation(e) => e.fmt(f),
            ModelError::Stats(e) => e.fmt(f),
            ModelError::CapRequired => write!(f, "truncated-frame analysis requires a bounded cap"),
            ModelError::Infeasible { n_primary, cap, target_outage } => write!(
                f,
                "no secondary load meets outage target {target_outage} with {n_primary} primary packets and cap {cap}"
            ),
        }
    }
}

impl std::error::Error for ModelError {}
