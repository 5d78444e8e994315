//! Network topology, link-loss configuration, per-frame packet bookkeeping
//! and the reproducible randomness contract shared by the simulator.
//!
//! The network couples a primary transmitter/receiver pair (PT, PR) with a
//! secondary pair (ST, SR). All five links are packet-erasure links with
//! constant loss probabilities; acknowledgements are instantaneous and
//! error-free.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Erasure probabilities of the five links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkProfile {
    /// PT -> PR (direct primary link).
    pub p1: f64,
    /// ST -> SR (direct secondary link).
    pub p2: f64,
    /// PT -> SR (cross link overheard by the secondary receiver).
    pub p12: f64,
    /// ST -> PR (cross link used for relayed retransmissions).
    pub p21: f64,
    /// PT -> ST (relay acquisition link).
    pub q: f64,
}

impl LinkProfile {
    pub fn new(p1: f64, p2: f64, p12: f64, p21: f64, q: f64) -> Self {
        Self { p1, p2, p12, p21, q }
    }

    /// Probability that a primary packet ends Session 1 missing at the PR,
    /// i.e. its terminal attempt reached only the ST: `p1(1-q)/(1-p1*q)`.
    pub fn primary_loss_at_pr(&self) -> f64 {
        self.p1 * (1.0 - self.q) / (1.0 - self.p1 * self.q)
    }
}

/// Per-frame workload: number of primary and secondary message packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameConfig {
    pub n_primary: u32,
    pub n_secondary: u32,
}

impl FrameConfig {
    pub fn new(n_primary: u32, n_secondary: u32) -> Result<Self, ValidationError> {
        if n_primary == 0 && n_secondary == 0 {
            return Err(ValidationError::EmptyWorkload);
        }
        Ok(Self { n_primary, n_secondary })
    }

    pub fn total_packets(&self) -> u64 {
        u64::from(self.n_primary) + u64::from(self.n_secondary)
    }
}

/// Frame-size constraint: unbounded (adaptive) or capped at a fixed number of
/// resource units, together with the outage target used for load sizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    cap: Option<u64>,
    target_outage: f64,
}

impl TruncationPolicy {
    /// Frames grow until every packet is delivered.
    pub fn unbounded() -> Self {
        Self { cap: None, target_outage: 0.1 }
    }

    /// Frames stop at `cap` resource units; overruns are outages.
    pub fn capped(cap: u64) -> Self {
        Self { cap: Some(cap), target_outage: 0.1 }
    }

    pub fn with_target_outage(mut self, target: f64) -> Result<Self, ValidationError> {
        if !(target > 0.0 && target < 1.0) {
            return Err(ValidationError::TargetOutageOutOfRange { value: target });
        }
        self.target_outage = target;
        Ok(self)
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    pub fn target_outage(&self) -> f64 {
        self.target_outage
    }

    /// A bounded cap must leave room for one transmission per packet.
    pub fn validate_against(&self, config: &FrameConfig) -> Result<(), ValidationError> {
        if let Some(cap) = self.cap {
            if cap < config.total_packets() {
                return Err(ValidationError::CapBelowWorkload {
                    cap,
                    packets: config.total_packets(),
                });
            }
        }
        Ok(())
    }
}

/// Validation failures for profiles, workloads and truncation policies.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationError {
    /// A loss probability lies outside [0, 1].
    FieldOutOfRange { field: &'static str, value: f64 },
    /// The named transmission phase has unbounded expected duration.
    NonTerminating { phase: &'static str },
    /// Np + Ns must be at least one.
    EmptyWorkload,
    /// Bounded cap smaller than the packet count.
    CapBelowWorkload { cap: u64, packets: u64 },
    /// Sizing target outside (0, 1).
    TargetOutageOutOfRange { value: f64 },
}

impl core::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ValidationError::FieldOutOfRange { field, value } => {
                write!(f, "link probability `{field}` = {value} is outside [0, 1]")
            }
            ValidationError::NonTerminating { phase } => {
                write!(f, "non-terminating configuration: {phase} has infinite expected duration")
            }
            ValidationError::EmptyWorkload => write!(f, "workload must contain at least one packet"),
            ValidationError::CapBelowWorkload { cap, packets } => {
                write!(f, "frame cap {cap} is below the packet count {packets}")
            }
            ValidationError::TargetOutageOutOfRange { value } => {
                write!(f, "target outage {value} must lie strictly inside (0, 1)")
            }
        }
    }
}

impl std::error::Error for ValidationError {}

/// Check field ranges and conditional finiteness of every retransmission
/// phase, returning the profile unchanged when it is usable with `config`.
///
/// `p21 = 1` is rejected conservatively whenever the expected relayed primary
/// load `p1(1-q)` is nonzero, and `p2 = 1` whenever secondary packets exist.
pub fn validate_profile(
    profile: LinkProfile,
    config: &FrameConfig,
) -> Result<LinkProfile, ValidationError> {
    let fields = [
        ("p1", profile.p1),
        ("p2", profile.p2),
        ("p12", profile.p12),
        ("p21", profile.p21),
        ("q", profile.q),
    ];
    for (field, value) in fields {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(ValidationError::FieldOutOfRange { field, value });
        }
    }
    if config.n_primary > 0 {
        if profile.p1 * profile.q >= 1.0 {
            return Err(ValidationError::NonTerminating { phase: "primary transmission" });
        }
        if profile.p21 >= 1.0 && profile.p1 * (1.0 - profile.q) > 0.0 {
            return Err(ValidationError::NonTerminating { phase: "primary retransmission" });
        }
    }
    if config.n_secondary > 0 && profile.p2 >= 1.0 {
        return Err(ValidationError::NonTerminating { phase: "secondary transmission" });
    }
    Ok(profile)
}

/// Dense set of packet ids `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketSet {
    bits: Vec<bool>,
    len: u32,
}

impl PacketSet {
    pub fn new(universe: u32) -> Self {
        Self { bits: vec![false; universe as usize], len: 0 }
    }

    pub fn universe(&self) -> u32 {
        self.bits.len() as u32
    }

    /// Insert `id`; returns whether the set changed.
    pub fn insert(&mut self, id: u32) -> bool {
        let slot = &mut self.bits[id as usize];
        if *slot {
            false
        } else {
            *slot = true;
            self.len += 1;
            true
        }
    }

    pub fn contains(&self, id: u32) -> bool {
        self.bits[id as usize]
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len as usize == self.bits.len()
    }

    /// Ids in the set, ascending.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u32)
    }

    /// Ids missing from the set, ascending.
    pub fn missing(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| !**b).map(|(i, _)| i as u32)
    }
}

/// Packet bookkeeping accumulated over the three sessions of one frame.
#[derive(Debug, Clone)]
pub struct SessionState {
    /// Primary packets held by the PR.
    pub received_pr: PacketSet,
    /// Secondary packets held by the SR.
    pub received_sr_secondary: PacketSet,
    /// Primary packets overheard by the SR.
    pub overheard_sr_primary: PacketSet,
    /// Secondary packets overheard by the PR.
    pub overheard_pr_secondary: PacketSet,
    /// Primary packets held by the ST.
    pub at_st: PacketSet,
    /// Resource units consumed so far.
    pub slots_used: u64,
}

impl SessionState {
    pub fn new(config: &FrameConfig) -> Self {
        Self {
            received_pr: PacketSet::new(config.n_primary),
            received_sr_secondary: PacketSet::new(config.n_secondary),
            overheard_sr_primary: PacketSet::new(config.n_primary),
            overheard_pr_secondary: PacketSet::new(config.n_secondary),
            at_st: PacketSet::new(config.n_primary),
            slots_used: 0,
        }
    }

    /// After a completed Session 1 every primary packet sits at the PR or
    /// the ST (or both).
    pub fn primary_fully_captured(&self) -> bool {
        (0..self.received_pr.universe())
            .all(|id| self.received_pr.contains(id) || self.at_st.contains(id))
    }
}

/// Counter-style reproducible random stream: the draw sequence is a pure
/// function of `(seed, stream_index)`, and distinct stream indices yield
/// statistically independent sequences. Monte Carlo trials derive one stream
/// per trial index so results do not depend on worker count or scheduling.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self { seed, stream_index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// One uniform draw from [0, 1).
    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }
}

/// Loss event with probability exactly `p`, consuming one draw.
pub fn bernoulli_loss(p: f64, stream: &mut RandomStream) -> bool {
    stream.unit() < p
}
