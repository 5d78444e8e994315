//! Frame machines: one stop-and-wait slot at a time, drawing losses from the
//! frame's random stream in a fixed order so replays are byte-identical.

use super::{FrameOutcome, SchemeId};
use crate::channel::{
    bernoulli_loss, validate_profile, FrameConfig, LinkProfile, RandomStream, SessionState,
    TruncationPolicy, ValidationError,
};
use std::collections::VecDeque;

/// Slot counter with an optional hard cap.
struct Budget {
    used: u64,
    cap: Option<u64>,
}

impl Budget {
    fn new(cap: Option<u64>) -> Self {
        Self { used: 0, cap }
    }

    /// Consume one slot; `false` means the cap is exhausted and the frame is
    /// in outage (the slot is not consumed).
    fn consume(&mut self) -> bool {
        if let Some(cap) = self.cap {
            if self.used >= cap {
                return false;
            }
        }
        self.used += 1;
        true
    }
}

/// Session 1: the PT repeats each primary packet until the PR or the ST
/// holds it. On the terminal attempt the conditional reception pattern is
/// realized mechanically from the two per-attempt loss draws; the SR
/// overhears each packet with one Bernoulli draw regardless of how many
/// attempts it took.
fn session1(
    profile: &LinkProfile,
    stream: &mut RandomStream,
    budget: &mut Budget,
    state: &mut SessionState,
) -> bool {
    for id in 0..state.received_pr.universe() {
        loop {
            if !budget.consume() {
                return false;
            }
            let pr_lost = bernoulli_loss(profile.p1, stream);
            let st_lost = bernoulli_loss(profile.q, stream);
            if pr_lost && st_lost {
                continue;
            }
            if !pr_lost {
                state.received_pr.insert(id);
            }
            if !st_lost {
                state.at_st.insert(id);
            }
            if !bernoulli_loss(profile.p12, stream) {
                state.overheard_sr_primary.insert(id);
            }
            break;
        }
        debug_assert!(state.received_pr.contains(id) || state.at_st.contains(id));
    }
    debug_assert!(state.primary_fully_captured());
    true
}

/// Retransmit every id in `ids` stop-and-wait over a single erasure link,
/// recording deliveries in `delivered`.
fn stop_and_wait(
    ids: &[u32],
    loss: f64,
    stream: &mut RandomStream,
    budget: &mut Budget,
    delivered: &mut crate::channel::PacketSet,
) -> bool {
    for &id in ids {
        loop {
            if !budget.consume() {
                return false;
            }
            if !bernoulli_loss(loss, stream) {
                delivered.insert(id);
                break;
            }
        }
    }
    true
}

/// Session 2 of the network-coding schemes: each secondary packet is sent
/// exactly once; the SR receives it over `p2` while the PR overhears it over
/// `p21`, one draw each.
fn nc_session2(
    profile: &LinkProfile,
    stream: &mut RandomStream,
    budget: &mut Budget,
    state: &mut SessionState,
) -> bool {
    for id in 0..state.received_sr_secondary.universe() {
        if !budget.consume() {
            return false;
        }
        if !bernoulli_loss(profile.p2, stream) {
            state.received_sr_secondary.insert(id);
        }
        if !bernoulli_loss(profile.p21, stream) {
            state.overheard_pr_secondary.insert(id);
        }
    }
    true
}

/// Ids lost at the intended receiver but overheard by the other one,
/// ascending.
fn encodable(lost_at: &crate::channel::PacketSet, overheard: &crate::channel::PacketSet) -> Vec<u32> {
    lost_at.missing().filter(|&id| overheard.contains(id)).collect()
}

/// SNC Session 3: fixed XOR pairs by ascending id, each repeated until both
/// receivers hold it, then leftover packets individually.
fn snc_session3(
    profile: &LinkProfile,
    stream: &mut RandomStream,
    budget: &mut Budget,
    state: &mut SessionState,
    coded_slots: &mut u64,
) -> bool {
    let enc_p = encodable(&state.received_pr, &state.overheard_sr_primary);
    let enc_s = encodable(&state.received_sr_secondary, &state.overheard_pr_secondary);
    let k_min = enc_p.len().min(enc_s.len());
    debug_assert!(k_min as u32 <= state.received_pr.universe() - state.received_pr.len());
    debug_assert!(
        k_min as u32 <= state.received_sr_secondary.universe() - state.received_sr_secondary.len()
    );
    for n in 0..k_min {
        let (pid, sid) = (enc_p[n], enc_s[n]);
        let mut pr_has = false;
        let mut sr_has = false;
        while !(pr_has && sr_has) {
            if !budget.consume() {
                return false;
            }
            *coded_slots += 1;
            if !bernoulli_loss(profile.p21, stream) && !pr_has {
                pr_has = true;
                state.received_pr.insert(pid);
            }
            if !bernoulli_loss(profile.p2, stream) && !sr_has {
                sr_has = true;
                state.received_sr_secondary.insert(sid);
            }
        }
    }
    let residual_p: Vec<u32> = state.received_pr.missing().collect();
    if !stop_and_wait(&residual_p, profile.p21, stream, budget, &mut state.received_pr) {
        return false;
    }
    let residual_s: Vec<u32> = state.received_sr_secondary.missing().collect();
    stop_and_wait(&residual_s, profile.p2, stream, budget, &mut state.received_sr_secondary)
}

/// ANC Session 3: while either encodable set has pending packets the ST
/// transmits an XOR of the front of each nonempty set, re-pairing after every
/// acknowledgement; a successful reception clears exactly one pending packet
/// at that receiver. Never-overheard packets follow individually.
fn anc_session3(
    profile: &LinkProfile,
    stream: &mut RandomStream,
    budget: &mut Budget,
    state: &mut SessionState,
    coded_slots: &mut u64,
) -> bool {
    let mut pend_p: VecDeque<u32> =
        encodable(&state.received_pr, &state.overheard_sr_primary).into();
    let mut pend_s: VecDeque<u32> =
        encodable(&state.received_sr_secondary, &state.overheard_pr_secondary).into();
    while !pend_p.is_empty() || !pend_s.is_empty() {
        if !budget.consume() {
            return false;
        }
        if !pend_p.is_empty() && !pend_s.is_empty() {
            *coded_slots += 1;
        }
        if let Some(&pid) = pend_p.front() {
            if !bernoulli_loss(profile.p21, stream) {
                state.received_pr.insert(pid);
                pend_p.pop_front();
            }
        }
        if let Some(&sid) = pend_s.front() {
            if !bernoulli_loss(profile.p2, stream) {
                state.received_sr_secondary.insert(sid);
                pend_s.pop_front();
            }
        }
    }
    let residual_p: Vec<u32> = state.received_pr.missing().collect();
    debug_assert!(residual_p.iter().all(|&id| !state.overheard_sr_primary.contains(id)));
    if !stop_and_wait(&residual_p, profile.p21, stream, budget, &mut state.received_pr) {
        return false;
    }
    let residual_s: Vec<u32> = state.received_sr_secondary.missing().collect();
    debug_assert!(residual_s.iter().all(|&id| !state.overheard_pr_secondary.contains(id)));
    stop_and_wait(&residual_s, profile.p2, stream, budget, &mut state.received_sr_secondary)
}

/// Run Session 1 on its own with an unbounded budget.
pub fn run_session1(
    profile: &LinkProfile,
    n_primary: u32,
    stream: &mut RandomStream,
) -> Result<SessionState, ValidationError> {
    let config = FrameConfig::new(n_primary, 0)?;
    let profile = validate_profile(*profile, &config)?;
    let mut state = SessionState::new(&config);
    let mut budget = Budget::new(None);
    let done = session1(&profile, stream, &mut budget, &mut state);
    debug_assert!(done);
    state.slots_used = budget.used;
    Ok(state)
}

/// Execute one frame of the given scheme under the truncation policy.
pub fn run_frame(
    scheme: SchemeId,
    profile: &LinkProfile,
    config: &FrameConfig,
    policy: &TruncationPolicy,
    stream: &mut RandomStream,
) -> Result<FrameOutcome, ValidationError> {
    let profile = validate_profile(*profile, config)?;
    policy.validate_against(config)?;
    Ok(run_frame_validated(scheme, &profile, config, policy, stream))
}

/// Frame execution after validation; infallible.
pub(crate) fn run_frame_validated(
    scheme: SchemeId,
    profile: &LinkProfile,
    config: &FrameConfig,
    policy: &TruncationPolicy,
    stream: &mut RandomStream,
) -> FrameOutcome {
    let mut state = SessionState::new(config);
    let mut budget = Budget::new(policy.cap());
    let mut coded_slots = 0u64;

    let outcome = |state: &SessionState, b1: u64, b2: u64, b3: u64, outage: bool, coded: u64| {
        let total = b1 + b2 + b3;
        debug_assert!(state.slots_used == 0 || state.slots_used == total);
        FrameOutcome {
            scheme,
            b1,
            b2,
            b3,
            total,
            outage,
            delivered_primary: state.received_pr.len(),
            delivered_secondary: state.received_sr_secondary.len(),
            coded_slots: coded,
        }
    };

    // Session 1 is common to all three schemes.
    if !session1(profile, stream, &mut budget, &mut state) {
        state.slots_used = budget.used;
        return outcome(&state, budget.used, 0, 0, true, coded_slots);
    }
    let b1 = budget.used;

    // Session 2.
    let s2_done = match scheme {
        SchemeId::Arq => {
            let lost: Vec<u32> = state.received_pr.missing().collect();
            stop_and_wait(&lost, profile.p21, stream, &mut budget, &mut state.received_pr)
        }
        SchemeId::Snc | SchemeId::Anc => nc_session2(profile, stream, &mut budget, &mut state),
    };
    if !s2_done {
        state.slots_used = budget.used;
        return outcome(&state, b1, budget.used - b1, 0, true, coded_slots);
    }
    let b2 = budget.used - b1;
    debug_assert!(
        scheme == SchemeId::Arq || b2 == u64::from(config.n_secondary),
        "network-coding schemes spend exactly one slot per secondary packet in session 2"
    );

    // Session 3.
    let s3_done = match scheme {
        SchemeId::Arq => {
            let ids: Vec<u32> = state.received_sr_secondary.missing().collect();
            stop_and_wait(&ids, profile.p2, stream, &mut budget, &mut state.received_sr_secondary)
        }
        SchemeId::Snc => snc_session3(profile, stream, &mut budget, &mut state, &mut coded_slots),
        SchemeId::Anc => anc_session3(profile, stream, &mut budget, &mut state, &mut coded_slots),
    };
    let b3 = budget.used - b1 - b2;
    state.slots_used = budget.used;
    if !s3_done {
        return outcome(&state, b1, b2, b3, true, coded_slots);
    }

    debug_assert!(state.received_pr.is_full() && state.received_sr_secondary.is_full());
    debug_assert!(budget.used >= config.total_packets());
    outcome(&state, b1, b2, b3, false, coded_slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{FrameConfig, LinkProfile, RandomStream, TruncationPolicy};

    fn reference_profile() -> LinkProfile {
        LinkProfile::new(0.5, 0.4, 0.3, 0.2, 0.1)
    }

    #[test]
    fn lossless_session1_uses_one_slot_per_packet() {
        let profile = LinkProfile::new(0.0, 0.0, 0.0, 0.0, 0.0);
        let mut stream = RandomStream::new(1, 0);
        let state = run_session1(&profile, 20, &mut stream).unwrap();
        assert_eq!(state.slots_used, 20);
        assert!(state.received_pr.is_full());
        assert!(state.at_st.is_full());
        assert!(state.overheard_sr_primary.is_full());
    }

    #[test]
    fn session1_slot_and_loss_means_match_the_erasure_model() {
        let profile = reference_profile();
        let trials = 100_000u64;
        let (mut slots, mut lost) = (0u64, 0u64);
        for i in 0..trials {
            let mut stream = RandomStream::new(7, i);
            let state = run_session1(&profile, 50, &mut stream).unwrap();
            slots += state.slots_used;
            lost += u64::from(50 - state.received_pr.len());
        }
        let mean_slots = slots as f64 / trials as f64;
        let mean_lost = lost as f64 / trials as f64;
        // Np/(1 - p1 q) and Np p1 (1-q)/(1 - p1 q)
        assert!((mean_slots - 52.6316).abs() < 0.1, "mean slots {mean_slots}");
        assert!((mean_lost - 23.6842).abs() < 0.1, "mean lost {mean_lost}");
    }

    #[test]
    fn lossless_frames_use_exactly_one_slot_per_packet() {
        let profile = LinkProfile::new(0.0, 0.0, 0.0, 0.0, 0.0);
        let config = FrameConfig::new(50, 30).unwrap();
        for scheme in SchemeId::ALL {
            let mut stream = RandomStream::new(3, 0);
            let out = run_frame(scheme, &profile, &config, &TruncationPolicy::unbounded(), &mut stream)
                .unwrap();
            assert_eq!(out.total, 80);
            assert!(!out.outage);
            assert_eq!(out.delivered_primary, 50);
            assert_eq!(out.delivered_secondary, 30);
            assert_eq!(out.coded_slots, 0);
        }
    }

    #[test]
    fn every_successful_frame_delivers_everything() {
        let profile = reference_profile();
        let config = FrameConfig::new(13, 9).unwrap();
        let policy = TruncationPolicy::unbounded();
        for scheme in SchemeId::ALL {
            for i in 0..500 {
                let mut stream = RandomStream::new(11, i);
                let out = run_frame(scheme, &profile, &config, &policy, &mut stream).unwrap();
                assert!(!out.outage);
                assert_eq!(out.total, out.b1 + out.b2 + out.b3);
                assert_eq!(out.delivered_primary, 13);
                assert_eq!(out.delivered_secondary, 9);
                assert!(out.total >= 22);
                assert!(out.coded_slots <= out.b3);
                if scheme != SchemeId::Arq {
                    assert_eq!(out.b2, 9);
                }
            }
        }
    }

    #[test]
    fn truncated_frames_stop_exactly_at_the_cap() {
        let profile = reference_profile();
        let config = FrameConfig::new(13, 9).unwrap();
        let policy = TruncationPolicy::capped(30);
        for scheme in SchemeId::ALL {
            let mut outages = 0;
            for i in 0..2000 {
                let mut stream = RandomStream::new(5, i);
                let out = run_frame(scheme, &profile, &config, &policy, &mut stream).unwrap();
                assert_eq!(out.total, out.b1 + out.b2 + out.b3);
                if out.outage {
                    outages += 1;
                    assert_eq!(out.total, 30);
                    assert!(out.delivered_primary < 13 || out.delivered_secondary < 9);
                } else {
                    assert!(out.total <= 30);
                    assert_eq!((out.delivered_primary, out.delivered_secondary), (13, 9));
                }
            }
            assert!(outages > 0, "cap of 30 should produce some outages for {scheme}");
        }
    }

    #[test]
    fn replaying_a_stream_reproduces_the_outcome() {
        let profile = reference_profile();
        let config = FrameConfig::new(50, 30).unwrap();
        let policy = TruncationPolicy::capped(100);
        for scheme in SchemeId::ALL {
            let a = run_frame(scheme, &profile, &config, &policy, &mut RandomStream::new(9, 4))
                .unwrap();
            let b = run_frame(scheme, &profile, &config, &policy, &mut RandomStream::new(9, 4))
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn overhearing_is_once_per_packet() {
        // With p12 = 1 the SR never overhears, so SNC/ANC spend no coded slots.
        let profile = LinkProfile::new(0.5, 0.4, 1.0, 0.2, 0.1);
        let config = FrameConfig::new(20, 10).unwrap();
        for scheme in [SchemeId::Snc, SchemeId::Anc] {
            for i in 0..200 {
                let mut stream = RandomStream::new(2, i);
                let out =
                    run_frame(scheme, &profile, &config, &TruncationPolicy::unbounded(), &mut stream)
                        .unwrap();
                assert_eq!(out.coded_slots, 0);
            }
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        let config = FrameConfig::new(5, 5).unwrap();
        let bad = LinkProfile::new(1.5, 0.4, 0.3, 0.2, 0.1);
        assert!(run_frame(
            SchemeId::Arq,
            &bad,
            &config,
            &TruncationPolicy::unbounded(),
            &mut RandomStream::new(1, 0)
        )
        .is_err());
        let profile = reference_profile();
        assert!(run_frame(
            SchemeId::Arq,
            &profile,
            &config,
            &TruncationPolicy::capped(9),
            &mut RandomStream::new(1, 0)
        )
        .is_err());
    }
}
