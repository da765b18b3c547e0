//! Fixtures shared by the benchmarks.

use buildings_core::{PrimeContext, RingElement, RingId};

pub fn context(ring: RingId, a: i64, b: i64) -> PrimeContext {
    PrimeContext::new(ring, RingElement::from_i64(ring, a, b)).expect("prime")
}
