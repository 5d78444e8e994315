//! Scalar abstraction for the numerical substrate.
//!
//! The statistics layer is generic over the floating-point type so that the
//! same formulas can be evaluated in `f32` or `f64`. Concrete `f64` aliases
//! for the common types live at the crate root.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the statistics layer: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + core::fmt::Debug + core::fmt::Display + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn cst<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

/// Convert a count into the working scalar type.
#[inline]
pub(crate) fn cnt<T: Real>(n: u64) -> T {
    T::from_u64(n).expect("count representable in scalar type")
}
