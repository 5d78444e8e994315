//! Cooperative retransmission over packet-erasure links: a two-pair network
//! in which the secondary transmitter relays the primary message and may XOR
//! lost packets from both systems into coded retransmissions.
//!
//! The crate has four layers:
//!
//! * [`stats`] — negative-binomial laws, normal machinery (pdf/cdf/quantile),
//!   order-statistics moments, upper-truncated normal moments and the
//!   two-receiver broadcast efficiency; generic over the scalar type.
//! * [`channel`] — link-loss profiles, frame workloads, truncation policies,
//!   per-frame packet bookkeeping and the reproducible random-stream
//!   contract.
//! * [`sim`] — slot-by-slot frame execution for the ARQ, SNC and ANC
//!   strategies plus deterministic parallel Monte Carlo aggregation.
//! * [`model`] — closed-form and semi-analytic expectations, normal and
//!   truncated-normal approximations, retransmission bounds, outage
//!   evaluation and outage-constrained secondary-load sizing.

pub mod channel;
pub mod model;
pub mod scalar;
pub mod sim;
pub mod stats;

pub use channel::{
    bernoulli_loss, validate_profile, FrameConfig, LinkProfile, PacketSet, RandomStream,
    SessionState, TruncationPolicy, ValidationError,
};
pub use model::{
    cap_for_outage, coded_phase_exact, coded_phase_series, expected_b3_anc, expected_b3_snc,
    expected_b3_snc_expanded, expected_frame_arq, retransmission_bound, scheme_moments,
    size_secondary_load, throughput, Mode, ModelError, SchemeMoments, ThroughputReport,
};
pub use sim::{monte_carlo, run_frame, run_session1, EmpiricalSummary, FrameOutcome, SchemeId, SimError};
pub use stats::StatsError;

/// Working-precision instantiations of the generic statistics types.
pub type NormalMoments = stats::NormalMoments<f64>;
pub type TruncatedMoments = stats::TruncatedMoments<f64>;

/// Single-precision instantiations, for callers trading accuracy for size.
pub type NormalMoments32 = stats::NormalMoments<f32>;
pub type TruncatedMoments32 = stats::TruncatedMoments<f32>;
