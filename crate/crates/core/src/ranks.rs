//! The duality degree ν, the recursive rank `t_n` of the top homology of the
//! oriented Tits building, and its homology oracle.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeContext;
use crate::homology::reduced_homology;
use crate::ring::RingId;
use crate::tits::{build_oriented_tits, gaussian_binomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityParams {
    /// Real embeddings.
    pub r: u32,
    /// Conjugate pairs of complex embeddings.
    pub c: u32,
}

impl DualityParams {
    pub fn of(ring: RingId) -> Self {
        match ring {
            RingId::Integers => DualityParams { r: 1, c: 0 },
            _ => DualityParams { r: 0, c: 1 },
        }
    }
}

/// `ν = r·C(n+1, 2) + c·n² − n − r − c + 1`.
pub fn nu_degree(params: DualityParams, n: u32) -> i64 {
    let (r, c, n) = (params.r as i64, params.c as i64, n as i64);
    r * (n + 1) * n / 2 + c * n * n - n - r - c + 1
}

/// Reading of the factor multiplying the convolution sum in the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankVariant {
    /// The number of cosets `|F×/U|`.
    Cosets,
    /// The number of U-orbits on F, `1 + |F×/U|`.
    Orbits,
}

impl RankVariant {
    pub const ALL: [RankVariant; 2] = [RankVariant::Cosets, RankVariant::Orbits];

    pub fn name(self) -> &'static str {
        match self {
            RankVariant::Cosets => "cosets",
            RankVariant::Orbits => "orbits",
        }
    }
}

/// The reading the oracle confirms; see `cross_validate`.
pub const DEFAULT_VARIANT: RankVariant = RankVariant::Cosets;

/// `t_1, …, t_n` by the recursion
/// `t_n = ((c − 1) + c·q^{n−1})·t_{n−1} + f·(c − 1)·Σ_{k=1}^{n−2} q^k·|Gr_k(F^{n−1})|·t_k·t_{n−k−1}`
/// with `c = |F×/U|` and `f` fixed by the variant.
pub fn recursive_ranks(q: u64, cosets: u64, n: usize, variant: RankVariant) -> Vec<BigInt> {
    let c = BigInt::from(cosets);
    let f = match variant {
        RankVariant::Cosets => c.clone(),
        RankVariant::Orbits => &c + 1,
    };
    let qb = BigInt::from(q);
    let mut t: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for m in 2..=n {
        let mut next = (&c - 1 + &c * Pow::pow(&qb, (m - 1) as u32)) * &t[m - 1];
        let mut sum = BigInt::zero();
        for k in 1..=m.saturating_sub(2) {
            let gr = BigInt::from(gaussian_binomial(q, m - 1, k));
            sum += Pow::pow(&qb, k as u32) * gr * &t[k] * &t[m - k - 1];
        }
        next += &f * (&c - 1) * sum;
        t.push(next);
    }
    t.drain(..1);
    t.truncate(n);
    t
}

pub fn recursive_rank(ctx: &PrimeContext, n: usize, variant: RankVariant) -> BigInt {
    assert!(n >= 1, "t_n is defined for n ≥ 1");
    recursive_ranks(ctx.q() as u64, ctx.coset_count() as u64, n, variant).pop().unwrap()
}

/// `q^{C(n,2)}·|F×/U|^{n−1}`.
pub fn lower_bound(ctx: &PrimeContext, n: usize) -> BigUint {
    let q = BigUint::from(ctx.q());
    let c = BigUint::from(ctx.coset_count());
    Pow::pow(&q, (n * (n - 1) / 2) as u32) * Pow::pow(&c, (n - 1) as u32)
}

/// Rank of `H̃_{n−2}` of the oriented Tits building, after checking every
/// other reduced Betti number vanishes.
pub fn brute_force_rank(ctx: &PrimeContext, n: usize, cap: u64) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidParameter("the building needs n ≥ 2".into()));
    }
    let t = build_oriented_tits(ctx, n, cap)?;
    let r = reduced_homology(&t)?;
    if !r.concentrated_in(n - 2) {
        return Err(Error::WedgeProfile {
            degree: n - 2,
            betti: r.betti.clone(),
        });
    }
    Ok(BigInt::from(r.betti(n - 2)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryProvenance {
    Formula,
    Oracle,
    BothAgree,
    Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub n: usize,
    /// The value reported: the oracle when present, else the default formula.
    pub value: String,
    pub cosets: String,
    pub orbits: String,
    pub oracle: Option<String>,
    pub lower_bound: String,
    pub provenance: EntryProvenance,
    /// Variants whose value matches the oracle.
    pub agreeing: Vec<RankVariant>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTable {
    pub ring: RingId,
    pub p: String,
    pub q: usize,
    pub cosets: usize,
    pub variant: RankVariant,
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    /// Variants that match the oracle on every entry where it ran.
    pub fn consistent_variants(&self) -> Vec<RankVariant> {
        RankVariant::ALL
            .into_iter()
            .filter(|v| self.entries.iter().all(|e| e.oracle.is_none() || e.agreeing.contains(v)))
            .collect()
    }
}

/// Fill `t_1..t_{n_max}` by both readings of the formula and, where the
/// building stays within `oracle_cap` simplices, by homology.
pub fn cross_validate(ctx: &PrimeContext, n_max: usize, oracle_cap: Option<u64>) -> Result<RankTable> {
    let (q, c) = (ctx.q() as u64, ctx.coset_count() as u64);
    let cos = recursive_ranks(q, c, n_max, RankVariant::Cosets);
    let orb = recursive_ranks(q, c, n_max, RankVariant::Orbits);
    let mut entries = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let oracle = match (n, oracle_cap) {
            (1, Some(_)) => Some(BigInt::one()),
            (_, Some(cap)) => match brute_force_rank(ctx, n, cap) {
                Ok(v) => Some(v),
                Err(Error::ResourceCap { .. }) => None,
                Err(e) => return Err(e),
            },
            (_, None) => None,
        };
        let (fc, fo) = (&cos[n - 1], &orb[n - 1]);
        let default = match DEFAULT_VARIANT {
            RankVariant::Cosets => fc,
            RankVariant::Orbits => fo,
        };
        let mut agreeing = Vec::new();
        if let Some(o) = &oracle {
            if o == fc {
                agreeing.push(RankVariant::Cosets);
            }
            if o == fo {
                agreeing.push(RankVariant::Orbits);
            }
        }
        let provenance = match &oracle {
            None => EntryProvenance::Formula,
            Some(o) if o == default => EntryProvenance::BothAgree,
            Some(_) => EntryProvenance::Conflict,
        };
        entries.push(RankEntry {
            n,
            value: oracle.as_ref().unwrap_or(default).to_string(),
            cosets: fc.to_string(),
            orbits: fo.to_string(),
            oracle: oracle.map(|o| o.to_string()),
            lower_bound: lower_bound(ctx, n).to_string(),
            provenance,
            agreeing,
        });
    }
    Ok(RankTable {
        ring: ctx.ring(),
        p: ctx.p().to_string(),
        q: ctx.q(),
        cosets: ctx.coset_count(),
        variant: DEFAULT_VARIANT,
        entries,
    })
}
