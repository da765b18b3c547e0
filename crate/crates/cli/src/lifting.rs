//! Random special linear matrices over a residue field, lifted to the ring.

use buildings_core::linalg::{det_ring, lift_sl_matrix, random_sl, reduce_matrix};
use buildings_core::PrimeContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cache::sha256_hex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub ring: String,
    pub p: String,
    pub q: usize,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub lifted: usize,
    /// Samples whose lift failed, with the reason.
    pub failures: Vec<String>,
    /// Largest norm of an entry over all lifts.
    pub max_entry_norm: String,
}

impl LiftReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.lifted == self.samples
    }
}

/// A stream seed that depends only on the field, the size and the user seed.
pub fn stream_seed(ctx: &PrimeContext, n: usize, seed: u64) -> u64 {
    let digest = sha256_hex(format!("{} {} {n} {seed}", ctx.ring().name(), ctx.p()).as_bytes());
    u64::from_str_radix(&digest[..16], 16).expect("hex digest")
}

pub fn rng_for(ctx: &PrimeContext, n: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(ctx, n, seed))
}

/// Lift `samples` random matrices of `SL_n(F)` and check each lift has
/// determinant exactly 1 and reduces back to the sample.
pub fn lift_samples(ctx: &PrimeContext, n: usize, samples: usize, seed: u64) -> LiftReport {
    let mut rng = rng_for(ctx, n, seed);
    let ring = ctx.ring();
    let mut failures = Vec::new();
    let mut lifted = 0;
    let mut max_norm = num_bigint::BigInt::from(0);
    for i in 0..samples {
        let m = random_sl(ctx, n, &mut rng);
        match lift_sl_matrix(ctx, &m) {
            Ok(a) => {
                if det_ring(&a) != ring.one() {
                    failures.push(format!("sample {i}: determinant {}", det_ring(&a)));
                } else if reduce_matrix(ctx, &a) != m {
                    failures.push(format!("sample {i}: lift does not reduce to the sample"));
                } else {
                    lifted += 1;
                }
                for x in a.iter().flatten() {
                    max_norm = max_norm.max(x.norm());
                }
            }
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    LiftReport {
        ring: ring.name().to_string(),
        p: ctx.p().to_string(),
        q: ctx.q(),
        n,
        seed,
        samples,
        lifted,
        failures,
        max_entry_norm: max_norm.to_string(),
    }
}
