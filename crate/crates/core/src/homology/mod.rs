//! Reduced simplicial homology over Z and Q, edge-path groups and the 4-loop checks.

mod loops;
mod pi1;
mod rank;
mod snf;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use loops::{four_loop_check, show_class, show_vector, FourLoopReport, LoopCase};
pub use pi1::{
    enumerate_cosets, fundamental_group, is_trivial_group, simplify, GroupPresentation, GroupVerdict, TrivialityReport, Word,
    DEFAULT_EFFORT,
};
pub use rank::{
    boundary_column, boundary_rank, columns_rank, components, propagate, rank_exact, rank_mod_p, BoundaryRank, RankMethod,
    MODULAR_PRIME,
};
pub use snf::{invariant_factors, rank_and_torsion, SparseMatrix, DENSE_CAP};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Where a rank came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Formula,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyOptions {
    /// Highest degree of reduced homology to report; all degrees when `None`.
    pub max_degree: Option<usize>,
    /// Compute torsion by Smith normal form.
    pub torsion: bool,
    /// Allow the modular rank certificate before exact elimination.
    pub modular: bool,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            max_degree: None,
            torsion: false,
            modular: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankReport {
    /// Simplex counts per dimension.
    pub counts: Vec<usize>,
    /// Reduced Betti numbers per degree.
    pub betti: Vec<usize>,
    /// `rank ∂_k` for `k = 0, 1, …`, with `∂_0` the augmentation.
    pub boundary_ranks: Vec<usize>,
    pub methods: Vec<RankMethod>,
    /// Torsion coefficients of `H̃_k` per degree, when requested.
    pub torsion: Option<Vec<Vec<String>>>,
    pub provenance: Provenance,
    /// False only when all degrees were computed and the Euler check failed.
    pub euler_consistent: bool,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for RankReport {
    fn eq(&self, other: &Self) -> bool {
        self.counts == other.counts
            && self.betti == other.betti
            && self.boundary_ranks == other.boundary_ranks
            && self.torsion == other.torsion
    }
}

impl RankReport {
    pub fn betti(&self, k: usize) -> usize {
        self.betti.get(k).copied().unwrap_or(0)
    }

    /// Reduced homology vanishes in every computed degree except possibly `degree`.
    pub fn concentrated_in(&self, degree: usize) -> bool {
        self.betti.iter().enumerate().all(|(k, &b)| k == degree || b == 0)
    }

    pub fn vanishes_through(&self, k: usize) -> bool {
        self.betti.iter().take(k + 1).all(|&b| b == 0)
    }
}

pub fn reduced_homology(c: &SimplicialComplex) -> Result<RankReport> {
    reduced_homology_with(c, &HomologyOptions::default())
}

pub fn reduced_homology_with(c: &SimplicialComplex, opts: &HomologyOptions) -> Result<RankReport> {
    let start = Instant::now();
    if c.is_empty() || c.vertex_count() == 0 {
        return Err(Error::EmptyComplex);
    }
    let top = c.dim().unwrap_or(0);
    let last = opts.max_degree.map_or(top, |d| d.min(top));
    let counts = c.f_vector();
    // ranks of ∂_0 ..= ∂_{last+1}
    let mut ranks = vec![1usize];
    let mut methods = vec![RankMethod::Augmentation];
    let mut prev: Vec<u32> = vec![0];
    for d in 1..=last + 1 {
        if d > top {
            ranks.push(0);
            methods.push(RankMethod::Empty);
            break;
        }
        let r = boundary_rank(c, d, &prev, opts.modular);
        ranks.push(r.rank);
        methods.push(r.method);
        prev = r.basis;
    }
    let rank_at = |k: usize| ranks.get(k).copied().unwrap_or(0);
    let betti: Vec<usize> = (0..=last).map(|k| counts[k] - rank_at(k) - rank_at(k + 1)).collect();
    let torsion = if opts.torsion {
        let mut t = Vec::with_capacity(last + 1);
        for k in 0..=last {
            if k + 1 > top || k == 0 {
                t.push(Vec::new());
                continue;
            }
            let (_, tors) = rank_and_torsion(&boundary_matrix(c, k + 1))?;
            t.push(tors.iter().map(ToString::to_string).collect());
        }
        Some(t)
    } else {
        None
    };
    let euler_consistent = last < top || {
        let lhs = c.euler_characteristic() - 1;
        let rhs: i64 = betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        lhs == rhs
    };
    Ok(RankReport {
        counts,
        betti,
        boundary_ranks: ranks,
        methods,
        torsion,
        provenance: Provenance::Oracle,
        euler_consistent,
        wall_time: start.elapsed(),
    })
}

/// `∂_d` as a sparse integer matrix.
pub fn boundary_matrix(c: &SimplicialComplex, d: usize) -> SparseMatrix {
    let mut m = SparseMatrix::new(c.count(d - 1));
    for j in 0..c.count(d) {
        m.push_column(boundary_column(c, d, j));
    }
    m
}

/// Nonempty, path-connected, and `H̃_i = 0` for `1 ≤ i ≤ k`.
pub fn is_homologically_connected(c: &SimplicialComplex, k: usize) -> Result<bool> {
    if c.vertex_count() == 0 {
        return Ok(false);
    }
    if components(c).0 != 1 {
        return Ok(false);
    }
    if k == 0 {
        return Ok(true);
    }
    let r = reduced_homology_with(
        c,
        &HomologyOptions {
            max_degree: Some(k),
            ..HomologyOptions::default()
        },
    )?;
    Ok(r.vanishes_through(k))
}

/// `∂_{d−1} ∘ ∂_d = 0` in every dimension, checked exactly.
pub fn boundary_squared_vanishes(c: &SimplicialComplex) -> bool {
    let top = c.dim().unwrap_or(0);
    let mut acc: HashMap<u32, i64> = HashMap::new();
    for d in 2..=top {
        for j in 0..c.count(d) {
            acc.clear();
            for (face, s) in boundary_column(c, d, j) {
                for (r, t) in boundary_column(c, d - 1, face as usize) {
                    *acc.entry(r).or_insert(0) += s * t;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
    }
    true
}

/// Reduced Euler characteristic from counts equals the alternating Betti sum.
pub fn euler_consistent(c: &SimplicialComplex, r: &RankReport) -> bool {
    if r.betti.len() != c.dim().map_or(0, |d| d + 1) {
        return false;
    }
    let rhs: i64 = r.betti.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
    c.euler_characteristic() - 1 == rhs
}

/// Integral `H_1` from the boundary matrix, as (free rank, torsion).
pub fn first_homology(c: &SimplicialComplex) -> Result<(usize, Vec<String>)> {
    let r = reduced_homology_with(
        c,
        &HomologyOptions {
            max_degree: Some(1),
            torsion: true,
            modular: true,
        },
    )?;
    let torsion = r.torsion.as_ref().and_then(|t| t.get(1).cloned()).unwrap_or_default();
    Ok((r.betti(1), torsion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build, BuildOptions};
    use crate::complex::ComplexKind;
    use crate::field::PrimeContext;
    use crate::ring::{RingElement, RingId};
    use crate::tits::build_oriented_tits;

    fn ctx(ring: RingId, a: i64, b: i64) -> PrimeContext {
        PrimeContext::new(ring, RingElement::from_i64(ring, a, b)).unwrap()
    }

    fn rp2() -> SimplicialComplex {
        SimplicialComplex::from_facets(
            6,
            &[
                vec![0, 1, 2],
                vec![0, 2, 3],
                vec![0, 3, 4],
                vec![0, 4, 5],
                vec![0, 1, 5],
                vec![1, 2, 4],
                vec![2, 3, 5],
                vec![1, 3, 4],
                vec![1, 3, 5],
                vec![2, 4, 5],
            ],
        )
    }

    #[test]
    fn point_and_two_points() {
        let p = SimplicialComplex::from_facets(1, &[]);
        assert_eq!(reduced_homology(&p).unwrap().betti, vec![0]);
        let two = SimplicialComplex::from_facets(2, &[]);
        assert_eq!(reduced_homology(&two).unwrap().betti, vec![1]);
        assert!(!is_homologically_connected(&two, 0).unwrap());
        assert!(matches!(
            reduced_homology(&SimplicialComplex::from_facets(0, &[])),
            Err(Error::EmptyComplex)
        ));
    }

    #[test]
    fn spheres_and_projective_plane() {
        let s2 = SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        let r = reduced_homology(&s2).unwrap();
        assert_eq!(r.betti, vec![0, 0, 1]);
        assert!(r.euler_consistent);
        let r = reduced_homology_with(
            &rp2(),
            &HomologyOptions {
                torsion: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.betti, vec![0, 0, 0]);
        assert_eq!(r.torsion.unwrap()[1], vec!["2".to_string()]);
        assert!(boundary_squared_vanishes(&rp2()));
    }

    #[test]
    fn modular_and_exact_paths_agree() {
        let f = ctx(RingId::Integers, 5, 0);
        let c = build(&f, ComplexKind::BDA, 2, 0, &BuildOptions::default()).unwrap();
        let a = reduced_homology(&c).unwrap();
        let b = reduced_homology_with(
            &c,
            &HomologyOptions {
                modular: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.betti(1), 0);
        assert!(is_homologically_connected(&c, 1).unwrap());
    }

    #[test]
    fn oriented_tits_examples() {
        let g = ctx(RingId::Gaussian, 3, 0);
        let t2 = build_oriented_tits(&g, 2, u64::MAX).unwrap();
        assert_eq!(reduced_homology(&t2).unwrap().betti, vec![19]);
        let z5 = ctx(RingId::Integers, 5, 0);
        let t3 = build_oriented_tits(&z5, 3, u64::MAX).unwrap();
        let r = reduced_homology(&t3).unwrap();
        assert_eq!(r.betti, vec![0, 621]);
        assert!(r.euler_consistent);
    }

    #[test]
    fn bd2_is_connected() {
        let f = ctx(RingId::Integers, 5, 0);
        let c = build(&f, ComplexKind::BD, 2, 0, &BuildOptions::default()).unwrap();
        assert!(is_homologically_connected(&c, 0).unwrap());
    }

    #[test]
    fn abelianization_matches_first_homology() {
        for (ring, a, b) in [(RingId::Integers, 3, 0), (RingId::Gaussian, 3, 0)] {
            let f = ctx(ring, a, b);
            let c = build(&f, ComplexKind::BDA, 2, 0, &BuildOptions::default()).unwrap();
            let p = fundamental_group(&c, 0).unwrap();
            let (free, tors) = p.abelianization().unwrap();
            let (b1, t1) = first_homology(&c).unwrap();
            assert_eq!(free, b1);
            assert_eq!(tors.iter().map(ToString::to_string).collect::<Vec<_>>(), t1);
        }
    }

    #[test]
    fn eisenstein_bda2_is_simply_connected() {
        let f = ctx(RingId::Eisenstein, 1, 4);
        let c = build(&f, ComplexKind::BDA, 2, 0, &BuildOptions::default()).unwrap();
        assert_eq!(c.f_vector(), vec![28, 182, 364]);
        let r = is_trivial_group(&fundamental_group(&c, 0).unwrap(), DEFAULT_EFFORT).unwrap();
        assert_eq!(r.verdict, GroupVerdict::Trivial);
    }
}
