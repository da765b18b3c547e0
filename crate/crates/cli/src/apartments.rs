//! Apartment classes in Tits buildings: each is a cycle, and enough of them
//! span the top homology.

use anyhow::{bail, Result};
use buildings_core::homology::{boundary_column, columns_rank, reduced_homology};
use buildings_core::linalg::{self, random_matrix, FMatrix};
use buildings_core::tits::{build_oriented_tits, build_tits, TitsLookup};
use buildings_core::{PrimeContext, SimplicialComplex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lifting::rng_for;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApartmentReport {
    pub ring: String,
    pub p: String,
    pub q: usize,
    pub n: usize,
    pub oriented: bool,
    pub seed: u64,
    pub samples: usize,
    /// Rank of the top reduced homology of the building.
    pub betti: usize,
    /// Samples whose chain has zero boundary.
    pub cycles: usize,
    /// Rank over Q of the span of the sampled chains.
    pub span_rank: usize,
}

impl ApartmentReport {
    pub fn all_cycles(&self) -> bool {
        self.cycles == self.samples
    }

    pub fn spans(&self) -> bool {
        self.span_rank == self.betti
    }
}

pub fn random_basis<R: Rng>(ctx: &PrimeContext, n: usize, rng: &mut R) -> FMatrix {
    loop {
        let m = random_matrix(ctx, n, rng);
        if linalg::rank(ctx, &m) == n {
            return m;
        }
    }
}

fn building(ctx: &PrimeContext, n: usize, oriented: bool, cap: u64) -> Result<SimplicialComplex> {
    Ok(if oriented {
        build_oriented_tits(ctx, n, cap)?
    } else {
        build_tits(ctx, n, cap)?
    })
}

fn is_cycle(c: &SimplicialComplex, d: usize, chain: &[(usize, i64)]) -> bool {
    if d == 0 {
        return chain.iter().map(|&(_, a)| a).sum::<i64>() == 0;
    }
    let mut acc = std::collections::HashMap::new();
    for &(s, a) in chain {
        for (r, e) in boundary_column(c, d, s) {
            *acc.entry(r).or_insert(0i64) += a * e;
        }
    }
    acc.values().all(|&v| v == 0)
}

fn columns(chains: &[Vec<(usize, i64)>]) -> Vec<Vec<(u32, i64)>> {
    chains.iter().map(|ch| ch.iter().map(|&(s, a)| (s as u32, a)).collect()).collect()
}

/// Sample `samples` random bases, check every apartment chain is a cycle and
/// compute the rank of their span.
pub fn apartment_check(ctx: &PrimeContext, n: usize, oriented: bool, samples: usize, seed: u64, cap: u64) -> Result<ApartmentReport> {
    if n < 2 {
        bail!("apartments need n ≥ 2");
    }
    let c = building(ctx, n, oriented, cap)?;
    let h = reduced_homology(&c)?;
    let lookup = TitsLookup::new(&c)?;
    let mut rng = rng_for(ctx, n, seed);
    let mut chains = Vec::with_capacity(samples);
    let mut cycles = 0;
    for _ in 0..samples {
        let basis = random_basis(ctx, n, &mut rng);
        let chain = lookup.apartment_chain(ctx, &c, &basis)?;
        cycles += usize::from(is_cycle(&c, n - 2, &chain));
        chains.push(chain);
    }
    let betti = h.betti(n - 2);
    let span_rank = columns_rank(c.count(n - 2), &columns(&chains), Some(betti));
    Ok(ApartmentReport {
        ring: ctx.ring().name().to_string(),
        p: ctx.p().to_string(),
        q: ctx.q(),
        n,
        oriented,
        seed,
        samples,
        betti,
        cycles,
        span_rank,
    })
}
