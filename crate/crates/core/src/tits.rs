//! Tits buildings of `F^n`, plain and U-oriented, and apartment chains.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{sort_tuples, ComplexKind, Header, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeContext};
use crate::linalg::{self, FMatrix};

/// A subspace of `F^n` in reduced row echelon form, optionally carrying a
/// U-orientation class (an index into the cosets of `F×/U`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedSubspace {
    basis: FMatrix,
    pivots: Vec<usize>,
    orientation: Option<usize>,
}

impl OrientedSubspace {
    /// The span of `rows` (any spanning list).
    pub fn span(ctx: &PrimeContext, rows: &[Vec<Fe>]) -> Self {
        let (basis, pivots) = linalg::rref(ctx, rows);
        OrientedSubspace {
            basis,
            pivots,
            orientation: None,
        }
    }

    /// The span of independent `rows`, oriented by their wedge.
    pub fn oriented_span(ctx: &PrimeContext, rows: &[Vec<Fe>]) -> Result<Self> {
        let mut s = OrientedSubspace::span(ctx, rows);
        if s.dim() != rows.len() {
            return Err(Error::Dependent);
        }
        s.orientation = Some(s.orientation_of(ctx, rows));
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis.first().map_or(0, Vec::len)
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn orientation(&self) -> Option<usize> {
        self.orientation
    }

    pub fn with_orientation(mut self, class: usize) -> Self {
        self.orientation = Some(class);
        self
    }

    /// `w_1 ∧ ⋯ ∧ w_d = c · (r_1 ∧ ⋯ ∧ r_d)` for the echelon rows `r_j`; returns the coset of `c`.
    ///
    /// The echelon basis is the identity on pivot columns, so `c` is the
    /// determinant of the pivot-column submatrix of the `w_i`.
    pub fn orientation_of(&self, ctx: &PrimeContext, rows: &[Vec<Fe>]) -> usize {
        let minor: FMatrix = rows.iter().map(|w| self.pivots.iter().map(|&p| w[p]).collect()).collect();
        let c = linalg::det(ctx, &minor);
        assert!(!c.is_zero(), "vectors do not span the subspace");
        ctx.coset_index(c)
    }

    /// Whether `v` lies in the subspace.
    pub fn contains_vector(&self, ctx: &PrimeContext, v: &[Fe]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = w[p];
            if c.is_zero() {
                continue;
            }
            for (x, &r) in w.iter_mut().zip(row) {
                *x = ctx.sub(*x, ctx.mul(c, r));
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn is_subspace_of(&self, ctx: &PrimeContext, other: &OrientedSubspace) -> bool {
        self.dim() <= other.dim() && self.basis.iter().all(|r| other.contains_vector(ctx, r))
    }

    fn payload(&self) -> Vec<u32> {
        let mut out = vec![self.dim() as u32];
        if let Some(o) = self.orientation {
            out.push(o as u32);
        }
        out.extend(self.basis.iter().flatten().map(|x| x.0));
        out
    }
}

/// `[n choose k]_q = ∏_{i<k} (q^{n−i} − 1)/(q^{i+1} − 1)`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    num / den
}

/// All k-dimensional subspaces of `F^n`, by pivot pattern then free entries.
pub fn enumerate_subspaces(ctx: &PrimeContext, n: usize, k: usize) -> Vec<OrientedSubspace> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    pivot_patterns(n, k, 0, &mut pivots, &mut |piv| {
        // free slots: (row i, column c) with c > piv[i] and c not a pivot
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| (piv[i] + 1..n).filter(|c| !piv.contains(c)).map(move |c| (i, c)))
            .collect();
        let q = ctx.q();
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut basis = vec![vec![Fe::ZERO; n]; k];
            for (i, &p) in piv.iter().enumerate() {
                basis[i][p] = Fe::ONE;
            }
            for (&(i, c), &d) in free.iter().zip(&digits) {
                basis[i][c] = Fe(d as u32);
            }
            out.push(OrientedSubspace {
                basis,
                pivots: piv.to_vec(),
                orientation: None,
            });
            // odometer, last slot fastest
            let mut j = free.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < q {
                    break;
                }
                digits[j] = 0;
            }
        }
    });
    out
}

fn pivot_patterns(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        if n - c < k - cur.len() {
            break;
        }
        cur.push(c);
        pivot_patterns(n, k, c + 1, cur, f);
        cur.pop();
    }
}

/// Proper nonzero subspaces ordered by (dimension, enumeration order).
fn proper_subspaces(ctx: &PrimeContext, n: usize) -> Vec<OrientedSubspace> {
    (1..n).flat_map(|k| enumerate_subspaces(ctx, n, k)).collect()
}

/// Flags of proper subspaces as sorted index tuples, per length.
fn flags(ctx: &PrimeContext, subs: &[OrientedSubspace], cap: u64, orientations: u128) -> Result<Vec<Vec<u32>>> {
    let count = subs.len();
    let mut up: Vec<Vec<u32>> = vec![Vec::new(); count];
    for i in 0..count {
        for j in i + 1..count {
            if subs[j].dim() > subs[i].dim() && subs[i].is_subspace_of(ctx, &subs[j]) {
                up[i].push(j as u32);
            }
        }
    }
    // chains starting at each vertex, by length, counted before enumerating
    let max_len = subs.last().map_or(0, |s| s.dim());
    let mut chains_from = vec![vec![0u128; max_len + 1]; count];
    for i in (0..count).rev() {
        chains_from[i][1] = 1;
        for &j in &up[i] {
            for len in 2..=max_len {
                chains_from[i][len] += chains_from[j as usize][len - 1];
            }
        }
    }
    let projected: u128 = (1..=max_len)
        .map(|len| chains_from.iter().map(|c| c[len]).sum::<u128>().saturating_mul(orientations.saturating_pow(len as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    if projected > cap as u128 {
        return Err(Error::ResourceCap { projected, cap });
    }
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(); max_len];
    let mut stack = Vec::new();
    fn walk(i: usize, up: &[Vec<u32>], stack: &mut Vec<u32>, levels: &mut [Vec<u32>]) {
        stack.push(i as u32);
        levels[stack.len() - 1].extend_from_slice(stack);
        for &j in &up[i] {
            walk(j as usize, up, stack, levels);
        }
        stack.pop();
    }
    for i in 0..count {
        walk(i, &up, &mut stack, &mut levels);
    }
    Ok(levels)
}

fn tits_header(ctx: &PrimeContext, kind: ComplexKind, n: usize) -> Header {
    Header {
        kind,
        ring: Some(ctx.ring()),
        p: Some(ctx.p().to_string()),
        q: ctx.q(),
        n,
        m: 0,
        max_dim: None,
    }
}

/// The order complex of proper nonzero subspaces of `F^n`.
pub fn build_tits(ctx: &PrimeContext, n: usize, cap: u64) -> Result<SimplicialComplex> {
    if n < 2 {
        return Err(Error::InvalidParameter("Tits buildings need n ≥ 2".into()));
    }
    let subs = proper_subspaces(ctx, n);
    let levels = flags(ctx, &subs, cap, 1)?;
    let levels = levels
        .into_iter()
        .enumerate()
        .map(|(d, l)| sort_tuples(l, d + 1, None).0)
        .collect();
    let vertices = subs.iter().map(OrientedSubspace::payload).collect();
    Ok(SimplicialComplex::from_levels(tits_header(ctx, ComplexKind::Tits, n), vertices, levels, None))
}

/// Proper nonzero subspaces each decorated with a U-orientation; simplices are
/// the sets whose underlying subspaces form a flag.
///
/// Vertex `s·c + o` is subspace `s` with orientation class `o`, where `c = |F×/U|`.
pub fn build_oriented_tits(ctx: &PrimeContext, n: usize, cap: u64) -> Result<SimplicialComplex> {
    if n < 2 {
        return Err(Error::InvalidParameter("Tits buildings need n ≥ 2".into()));
    }
    let c = ctx.coset_count();
    let subs = proper_subspaces(ctx, n);
    let base = flags(ctx, &subs, cap, c as u128)?;
    let mut levels = Vec::with_capacity(base.len());
    for (d, l) in base.into_iter().enumerate() {
        let w = d + 1;
        let combos = c.pow(w as u32);
        let mut out = Vec::with_capacity(l.len() * combos);
        for chain in l.chunks_exact(w) {
            for code in 0..combos {
                let mut k = code;
                let start = out.len();
                out.extend(chain.iter().map(|&s| s * c as u32));
                for x in out[start..].iter_mut().rev() {
                    *x += (k % c) as u32;
                    k /= c;
                }
            }
        }
        levels.push(sort_tuples(out, w, None).0);
    }
    let vertices = subs
        .iter()
        .flat_map(|s| (0..c).map(move |o| s.clone().with_orientation(o).payload()))
        .collect();
    Ok(SimplicialComplex::from_levels(
        tits_header(ctx, ComplexKind::OrientedTits, n),
        vertices,
        levels,
        None,
    ))
}

/// Maps subspaces (and orientations) of a built Tits building to vertex ids.
pub struct TitsLookup {
    oriented: bool,
    n: usize,
    ids: HashMap<Vec<u32>, u32>,
}

impl TitsLookup {
    pub fn new(complex: &SimplicialComplex) -> Result<Self> {
        let oriented = match complex.kind() {
            ComplexKind::Tits => false,
            ComplexKind::OrientedTits => true,
            other => {
                return Err(Error::WrongComplexType {
                    expected: "T or TU".into(),
                    found: other.to_string(),
                })
            }
        };
        let ids = complex.vertices().iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        Ok(TitsLookup {
            oriented,
            n: complex.header().n,
            ids,
        })
    }

    pub fn vertex(&self, s: &OrientedSubspace) -> Option<u32> {
        let mut key = s.payload();
        if !self.oriented && s.orientation.is_some() {
            key.remove(1);
        }
        self.ids.get(&key).copied()
    }

    /// The signed sum over `σ ∈ S_n` of the flags `⟨v_σ(1)⟩ ⊂ ⟨v_σ(1), v_σ(2)⟩ ⊂ ⋯`,
    /// as `(simplex index, coefficient)` in dimension `n − 2`, sorted by index.
    /// In the oriented building each flag member carries the class of the
    /// wedge of its listed vectors.
    pub fn apartment_chain(&self, ctx: &PrimeContext, complex: &SimplicialComplex, basis: &[Vec<Fe>]) -> Result<Vec<(usize, i64)>> {
        let n = self.n;
        if basis.len() != n || basis.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidParameter(format!("need {n} vectors of length {n}")));
        }
        if linalg::rank(ctx, basis) != n {
            return Err(Error::Dependent);
        }
        let mut acc: HashMap<usize, i64> = HashMap::new();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1i64;
        // Heap's algorithm; each step is a transposition
        let mut c = vec![0usize; n];
        let mut visit = |perm: &[usize], sign: i64| -> Result<()> {
            let mut simplex = Vec::with_capacity(n - 1);
            for k in 1..n {
                let rows: Vec<Vec<Fe>> = perm[..k].iter().map(|&i| basis[i].clone()).collect();
                let s = if self.oriented {
                    OrientedSubspace::oriented_span(ctx, &rows)?
                } else {
                    OrientedSubspace::span(ctx, &rows)
                };
                simplex.push(self.vertex(&s).expect("flag member is a vertex"));
            }
            let idx = complex.index_of(&simplex).expect("flag is a simplex");
            *acc.entry(idx).or_insert(0) += sign;
            Ok(())
        };
        visit(&perm, sign)?;
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                sign = -sign;
                visit(&perm, sign)?;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let mut out: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Convenience wrapper around [`TitsLookup::apartment_chain`].
pub fn apartment_chain(ctx: &PrimeContext, complex: &SimplicialComplex, basis: &[Vec<Fe>]) -> Result<Vec<(usize, i64)>> {
    TitsLookup::new(complex)?.apartment_chain(ctx, complex, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::DEFAULT_SIMPLEX_CAP;
    use crate::ring::{RingElement, RingId};
    use std::collections::HashSet;

    fn ctx(ring: RingId, a: i64, b: i64) -> PrimeContext {
        PrimeContext::new(ring, RingElement::from_i64(ring, a, b)).unwrap()
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(3, 2, 1), BigUint::from(4u32));
        assert_eq!(gaussian_binomial(9, 3, 1), BigUint::from(91u32));
        assert_eq!(gaussian_binomial(13, 3, 2), BigUint::from(183u32));
        assert_eq!(gaussian_binomial(2, 4, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(5, 3, 0), BigUint::one());
        assert_eq!(gaussian_binomial(5, 3, 4), BigUint::zero());
    }

    #[test]
    fn subspace_counts_match_binomials() {
        let mut fields = Vec::new();
        for ring in RingId::ALL {
            for p in ring.primes_up_to_norm(13) {
                fields.push(PrimeContext::new(ring, p).unwrap());
            }
        }
        for f in &fields {
            for n in 1..=4usize {
                if (f.q() as u64).pow(n as u32) > 30_000 {
                    continue;
                }
                for k in 0..=n {
                    let subs = enumerate_subspaces(f, n, k);
                    assert_eq!(BigUint::from(subs.len()), gaussian_binomial(f.q() as u64, n, k));
                    let distinct: HashSet<_> = subs.iter().map(|s| s.basis.clone()).collect();
                    assert_eq!(distinct.len(), subs.len());
                    for s in &subs {
                        assert_eq!(OrientedSubspace::span(f, &s.basis).basis, s.basis);
                    }
                }
            }
        }
    }

    #[test]
    fn oriented_tits_small_counts() {
        let f9 = ctx(RingId::Gaussian, 3, 0);
        let t = build_oriented_tits(&f9, 2, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(t.f_vector(), vec![20]);
        let f5 = ctx(RingId::Integers, 5, 0);
        let t = build_oriented_tits(&f5, 3, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(t.f_vector(), vec![124, 744]);
        assert!(t.is_downward_closed());
        let plain = build_tits(&f5, 3, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(plain.f_vector(), vec![62, 186]);
    }

    #[test]
    fn oriented_equals_plain_for_full_unit_image() {
        let f = ctx(RingId::Integers, 3, 0);
        let a = build_tits(&f, 3, DEFAULT_SIMPLEX_CAP).unwrap();
        let b = build_oriented_tits(&f, 3, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(a.f_vector(), b.f_vector());
        assert_eq!(a.level(1), b.level(1));
    }

    #[test]
    fn apartment_for_n2() {
        let f = ctx(RingId::Integers, 5, 0);
        let t = build_tits(&f, 2, DEFAULT_SIMPLEX_CAP).unwrap();
        let e1 = vec![Fe::ONE, Fe::ZERO];
        let e2 = vec![Fe::ZERO, Fe::ONE];
        let chain = apartment_chain(&f, &t, &[e1.clone(), e2.clone()]).unwrap();
        let lk = TitsLookup::new(&t).unwrap();
        let a = lk.vertex(&OrientedSubspace::span(&f, &[e1])).unwrap() as usize;
        let b = lk.vertex(&OrientedSubspace::span(&f, &[e2])).unwrap() as usize;
        let mut want = vec![(a, 1), (b, -1)];
        want.sort();
        assert_eq!(chain, want);
    }

    #[test]
    fn apartment_for_n3_is_a_hexagon() {
        let f = ctx(RingId::Integers, 3, 0);
        let t = build_tits(&f, 3, DEFAULT_SIMPLEX_CAP).unwrap();
        let basis = linalg::identity(3);
        let chain = apartment_chain(&f, &t, &basis).unwrap();
        assert_eq!(chain.len(), 6);
        assert!(chain.iter().all(|&(_, c)| c.abs() == 1));
        // boundary vanishes
        let mut bd: HashMap<u32, i64> = HashMap::new();
        for &(i, c) in &chain {
            let e = t.simplex(1, i);
            *bd.entry(e[1]).or_default() += c;
            *bd.entry(e[0]).or_default() -= c;
        }
        assert!(bd.values().all(|&v| v == 0));
        assert!(apartment_chain(&f, &t, &[basis[0].clone(), basis[0].clone(), basis[1].clone()]).is_err());
    }

    #[test]
    fn orientation_classes() {
        let f = ctx(RingId::Gaussian, 3, 0);
        let e1 = vec![Fe::ONE, Fe::ZERO, Fe::ZERO];
        let e2 = vec![Fe::ZERO, Fe::ONE, Fe::ZERO];
        let s = OrientedSubspace::oriented_span(&f, &[e1.clone(), e2.clone()]).unwrap();
        assert_eq!(s.orientation(), Some(f.coset_index(Fe::ONE)));
        let c = f.nonzero().find(|&x| !f.is_unit_image(x)).unwrap();
        let scaled: Vec<Fe> = e2.iter().map(|&x| f.mul(c, x)).collect();
        let s2 = OrientedSubspace::oriented_span(&f, &[e1.clone(), scaled]).unwrap();
        assert_ne!(s.orientation(), s2.orientation());
        let swapped = OrientedSubspace::oriented_span(&f, &[e2, e1]).unwrap();
        assert_eq!(s.orientation(), swapped.orientation());
    }
}
