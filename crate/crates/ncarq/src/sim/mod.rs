//! Slot-by-slot execution of the three retransmission strategies and Monte
//! Carlo aggregation over reproducible per-trial random streams.

mod frame;
mod summary;

pub use frame::{run_frame, run_session1};
pub use summary::{monte_carlo, EmpiricalSummary};

use crate::channel::ValidationError;

/// The three retransmission strategies.
///
/// * `Arq`: the ST relays lost primary packets one by one, then transmits its
///   own message one packet at a time until acknowledged.
/// * `Snc`: the secondary message is sent once in Session 2; Session 3 repeats
///   each XOR pair until both receivers hold it, then falls back to
///   individual retransmissions.
/// * `Anc`: XOR pairs are re-formed after every acknowledgement, so each slot
///   serves both receivers as long as either has encodable packets pending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    Arq,
    Snc,
    Anc,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::Arq, SchemeId::Snc, SchemeId::Anc];
}

impl core::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            SchemeId::Arq => "ARQ",
            SchemeId::Snc => "SNC",
            SchemeId::Anc => "ANC",
        })
    }
}

impl core::str::FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "ARQ" => Ok(SchemeId::Arq),
            "SNC" => Ok(SchemeId::Snc),
            "ANC" => Ok(SchemeId::Anc),
            other => Err(format!("unknown scheme `{other}` (expected ARQ, SNC or ANC)")),
        }
    }
}

/// Realized outcome of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub scheme: SchemeId,
    /// Slots consumed by the primary transmission session.
    pub b1: u64,
    /// Slots consumed by the secondary transmission session.
    pub b2: u64,
    /// Slots consumed by the retransmission session.
    pub b3: u64,
    /// Total frame size in resource units, `b1 + b2 + b3`.
    pub total: u64,
    /// Frame hit the cap before every packet was delivered.
    pub outage: bool,
    /// Primary packets held by the PR at frame end.
    pub delivered_primary: u32,
    /// Secondary packets held by the SR at frame end.
    pub delivered_secondary: u32,
    /// Slots that carried an XOR of two pending packets.
    pub coded_slots: u64,
}

/// Errors from the simulation entry points.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Validation(ValidationError),
    /// Monte Carlo aggregation needs at least one trial.
    ZeroTrials,
}

impl From<ValidationError> for SimError {
    fn from(e: ValidationError) -> Self {
        SimError::Validation(e)
    }
}

impl core::fmt::Display for SimError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SimError::Validation(e) => e.fmt(f),
            SimError::ZeroTrials => write!(f, "at least one trial is required"),
        }
    }
}

impl std::error::Error for SimError {}
