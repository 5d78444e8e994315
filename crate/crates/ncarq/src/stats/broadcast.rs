//! Expected transmissions per packet on a two-receiver broadcast erasure
//! channel with per-receiver acknowledgements.

use super::StatsError;
use crate::scalar::Real;

/// Average number of attempts until both receivers hold the packet, when the
/// receivers erase independently with probabilities `pa` and `pb`:
/// `1/(1-pa) + 1/(1-pb) - 1/(1-pa*pb)`.
pub fn broadcast_efficiency_2<T: Real>(pa: T, pb: T) -> Result<T, StatsError> {
    for (name, p) in [("pa", pa), ("pb", pb)] {
        let pf = p.to_f64().unwrap_or(f64::NAN);
        if pf == 1.0 {
            return Err(StatsError::InfiniteExpectation { name });
        }
        if !(0.0..1.0).contains(&pf) {
            return Err(StatsError::ProbabilityOutOfRange { name, value: pf });
        }
    }
    let one = T::one();
    Ok(one / (one - pa) + one / (one - pb) - one / (one - pa * pb))
}
