//! Complexes of partial U-bases over a residue field: `B`, `BD`, `BA`, `BDA`
//! with link parameter `m`, and the primed subcomplexes.
//!
//! All of them live inside `F^{m+n}` with `e_1, …, e_m` fixed. Since the
//! matrix `(e_1 … e_m v_1 … v_k)` is block triangular, independence from the
//! `e`'s and the determinant both only see the last `n` coordinates (the tail).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{sort_tuples, ComplexKind, Header, SimplexLabel, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeContext};
use crate::linalg;

pub const DEFAULT_SIMPLEX_CAP: u64 = 5_000_000;

/// Largest `q^{m+n}` for which a dense vector-to-vertex table is allocated.
const MAX_DENSE_TABLE: u64 = 1 << 26;

const MAXN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Reject builds whose projected simplex count exceeds this.
    pub cap: u64,
    /// Build only the skeleton up to this dimension.
    pub max_dim: Option<usize>,
    pub parallel: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            cap: DEFAULT_SIMPLEX_CAP,
            max_dim: None,
            parallel: true,
        }
    }
}

impl BuildOptions {
    pub fn with_max_dim(mut self, d: usize) -> Self {
        self.max_dim = Some(d);
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

/// Scale `v` by a unit so that its first nonzero coordinate is the least
/// element of its coset in `F×/U`. Returns false for the zero vector.
pub fn canonicalize(ctx: &PrimeContext, v: &mut [Fe]) -> bool {
    let Some(&lead) = v.iter().find(|x| !x.is_zero()) else {
        return false;
    };
    let target = ctx.coset_rep(lead);
    if target != lead {
        let s = ctx.div(target, lead);
        for x in v.iter_mut() {
            *x = ctx.mul(*x, s);
        }
    }
    true
}

/// A nonzero vector of `F^k` up to scaling by U, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UVectorClass {
    coords: Vec<Fe>,
}

impl UVectorClass {
    pub fn new(ctx: &PrimeContext, mut coords: Vec<Fe>) -> Result<Self> {
        if !canonicalize(ctx, &mut coords) {
            return Err(Error::InvalidParameter("the zero vector is not a U-vector".into()));
        }
        Ok(UVectorClass { coords })
    }

    pub fn coords(&self) -> &[Fe] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Base-q digits, most significant first; orders like the coordinates.
    pub fn key(&self, q: usize) -> u64 {
        vector_key(&self.coords, q)
    }
}

pub fn vector_key(v: &[Fe], q: usize) -> u64 {
    v.iter().fold(0u64, |acc, x| acc * q as u64 + x.0 as u64)
}

/// The U-vectors of `F^{m+n}` with nonzero tail, in key order.
#[derive(Clone, Debug)]
pub struct VertexTable {
    width: usize,
    m: usize,
    coords: Vec<Fe>,
    lookup: Vec<u32>,
}

impl VertexTable {
    pub fn new(ctx: &PrimeContext, n: usize, m: usize) -> Result<Self> {
        let width = n + m;
        if n == 0 || width > MAXN {
            return Err(Error::InvalidParameter(format!("need 1 ≤ n and n + m ≤ {MAXN}")));
        }
        let q = ctx.q();
        let total = (q as u64).checked_pow(width as u32).filter(|&t| t <= MAX_DENSE_TABLE);
        let Some(total) = total else {
            return Err(Error::ResourceCap {
                projected: (q as u128).saturating_pow(width as u32),
                cap: MAX_DENSE_TABLE,
            });
        };
        let mut lookup = vec![u32::MAX; total as usize];
        let mut coords = Vec::new();
        let mut v = vec![Fe::ZERO; width];
        let mut count = 0u32;
        for key in 0..total {
            let mut k = key;
            for i in (0..width).rev() {
                v[i] = Fe((k % q as u64) as u32);
                k /= q as u64;
            }
            if v[m..].iter().all(|x| x.is_zero()) {
                continue;
            }
            let mut c = v.clone();
            canonicalize(ctx, &mut c);
            if c == v {
                lookup[key as usize] = count;
                coords.extend_from_slice(&v);
                count += 1;
            }
        }
        // point every vector at its class
        for key in 0..total {
            if lookup[key as usize] != u32::MAX {
                continue;
            }
            let mut k = key;
            for i in (0..width).rev() {
                v[i] = Fe((k % q as u64) as u32);
                k /= q as u64;
            }
            if v[m..].iter().all(|x| x.is_zero()) {
                continue;
            }
            canonicalize(ctx, &mut v);
            lookup[key as usize] = lookup[vector_key(&v, q) as usize];
        }
        Ok(VertexTable { width, m, coords, lookup })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn vector(&self, i: usize) -> &[Fe] {
        &self.coords[i * self.width..(i + 1) * self.width]
    }

    pub fn tail(&self, i: usize) -> &[Fe] {
        &self.vector(i)[self.m..]
    }

    /// Vertex of the class of `v`, if `v` has nonzero tail.
    pub fn index(&self, ctx: &PrimeContext, v: &[Fe]) -> Option<u32> {
        let id = self.lookup[vector_key(v, ctx.q()) as usize];
        (id != u32::MAX).then_some(id)
    }

    /// Drop the vertices whose tail fails `keep`, renumbering the rest in order.
    fn retain(&mut self, keep: impl Fn(&[Fe]) -> bool) {
        let mut remap = vec![u32::MAX; self.len()];
        let mut coords = Vec::new();
        let mut next = 0u32;
        for (i, r) in remap.iter_mut().enumerate() {
            if keep(self.tail(i)) {
                *r = next;
                next += 1;
                coords.extend_from_slice(self.vector(i));
            }
        }
        for id in self.lookup.iter_mut() {
            if *id != u32::MAX {
                *id = remap[*id as usize];
            }
        }
        self.coords = coords;
    }

    fn payloads(&self) -> Vec<Vec<u32>> {
        (0..self.len()).map(|i| self.vector(i).iter().map(|x| x.0).collect()).collect()
    }
}

/// Incremental row echelon basis of tails, for independence tests in the DFS.
#[derive(Clone)]
struct Echelon {
    n: usize,
    rows: [[Fe; MAXN]; MAXN],
    pivots: [usize; MAXN],
    len: usize,
}

impl Echelon {
    fn new(n: usize) -> Self {
        Echelon {
            n,
            rows: [[Fe::ZERO; MAXN]; MAXN],
            pivots: [0; MAXN],
            len: 0,
        }
    }

    /// Reduce `v` against the basis; `None` if it lies in the span.
    fn reduce(&self, ctx: &PrimeContext, v: &[Fe]) -> Option<[Fe; MAXN]> {
        let mut w = [Fe::ZERO; MAXN];
        w[..self.n].copy_from_slice(v);
        for r in 0..self.len {
            let c = w[self.pivots[r]];
            if c.is_zero() {
                continue;
            }
            for j in 0..self.n {
                let t = ctx.mul(c, self.rows[r][j]);
                w[j] = ctx.sub(w[j], t);
            }
        }
        w[..self.n].iter().any(|x| !x.is_zero()).then_some(w)
    }

    fn push(&mut self, ctx: &PrimeContext, mut w: [Fe; MAXN]) {
        let p = (0..self.n).find(|&j| !w[j].is_zero()).expect("nonzero row");
        let inv = ctx.inv(w[p]);
        for x in w[..self.n].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        self.rows[self.len] = w;
        self.pivots[self.len] = p;
        self.len += 1;
    }
}

/// Determinant of the square matrix whose rows are the given tails.
pub(crate) fn tails_det(ctx: &PrimeContext, rows: &[&[Fe]]) -> Fe {
    let n = rows.len();
    let mut a = [[Fe::ZERO; MAXN]; MAXN];
    for (i, r) in rows.iter().enumerate() {
        a[i][..n].copy_from_slice(r);
    }
    let mut d = Fe::ONE;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Fe::ZERO;
        };
        if piv != k {
            a.swap(piv, k);
            d = ctx.neg(d);
        }
        d = ctx.mul(d, a[k][k]);
        let inv = ctx.inv(a[k][k]);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = ctx.mul(a[i][k], inv);
            for j in k..n {
                let t = ctx.mul(f, a[k][j]);
                a[i][j] = ctx.sub(a[i][j], t);
            }
        }
    }
    d
}

/// Exact simplex counts by dimension, computed before anything is enumerated.
///
/// Ordered `s`-tuples with independent tails number `∏_{i<s}(qⁿ − qⁱ)·q^{ms}`;
/// dividing by `|U|^s s!` counts partial U-bases. For full-size simplices the
/// determinant is equidistributed on `F×`. An internally additive simplex is
/// produced from three different (standard simplex, apex) decompositions and an
/// externally additive one from two.
pub fn projected_counts(ctx: &PrimeContext, kind: ComplexKind, n: usize, m: usize, max_dim: Option<usize>) -> Vec<u128> {
    let q = ctx.q() as u128;
    let u = ctx.unit_image().len() as u128;
    let top = match kind {
        ComplexKind::BA | ComplexKind::BDA => n,
        _ => n - 1,
    };
    let top = max_dim.map_or(top, |d| d.min(top));
    let det_u = matches!(kind, ComplexKind::BD | ComplexKind::BDA);
    let apexes = match kind {
        ComplexKind::BA => ctx.coset_count() as u128 * (q - 1),
        _ => u,
    };
    let mut standard = vec![0u128; n + 1];
    let mut ordered: u128 = 1;
    let mut fact: u128 = 1;
    for s in 1..=n {
        let qn = q.saturating_pow(n as u32);
        let qi = q.saturating_pow(s as u32 - 1);
        ordered = ordered.saturating_mul(qn - qi).saturating_mul(q.saturating_pow(m as u32));
        fact *= s as u128;
        let mut c = ordered / u.saturating_pow(s as u32) / fact;
        if det_u && s == n {
            c = c * u / (q - 1);
        }
        standard[s] = c;
    }
    let augmented = matches!(kind, ComplexKind::BA | ComplexKind::BDA);
    (0..=top)
        .map(|d| {
            let mut c = standard.get(d + 1).copied().unwrap_or(0);
            if augmented && d >= 1 {
                let s = d as u128;
                let internal = standard[d].saturating_mul(s * (s - 1) / 2).saturating_mul(apexes) / 3;
                let external = standard[d].saturating_mul(s * m as u128).saturating_mul(apexes) / 2;
                c = c.saturating_add(internal).saturating_add(external);
            }
            c
        })
        .collect()
}

fn check_cap(projected: &[u128], cap: u64) -> Result<()> {
    let total = projected.iter().fold(0u128, |a, &b| a.saturating_add(b));
    if total > cap as u128 {
        return Err(Error::ResourceCap { projected: total, cap });
    }
    Ok(())
}

/// Standard simplices with up to `max_size` vertices, as per-size flattened
/// lexicographic lists (`out[s - 1]` holds the `s`-vertex simplices).
fn standard_simplices(ctx: &PrimeContext, table: &VertexTable, n: usize, det_u: bool, max_size: usize, parallel: bool) -> Vec<Vec<u32>> {
    let nv = table.len();
    let root = |v0: usize| -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); max_size];
        let mut stack: Vec<u32> = vec![v0 as u32];
        let mut ech = Echelon::new(n);
        let w = ech.reduce(ctx, table.tail(v0)).expect("vertices have nonzero tails");
        ech.push(ctx, w);
        out[0].push(v0 as u32);
        dfs(ctx, table, n, det_u, max_size, &mut stack, &ech, &mut out);
        out
    };
    let parts: Vec<Vec<Vec<u32>>> = if parallel {
        (0..nv).into_par_iter().map(root).collect()
    } else {
        (0..nv).map(root).collect()
    };
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); max_size];
    for part in parts {
        for (s, data) in part.into_iter().enumerate() {
            out[s].extend(data);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ctx: &PrimeContext,
    table: &VertexTable,
    n: usize,
    det_u: bool,
    max_size: usize,
    stack: &mut Vec<u32>,
    ech: &Echelon,
    out: &mut [Vec<u32>],
) {
    let size = stack.len();
    if size >= max_size {
        return;
    }
    let last = *stack.last().unwrap() as usize;
    for v in last + 1..table.len() {
        let Some(w) = ech.reduce(ctx, table.tail(v)) else {
            continue;
        };
        if det_u && size + 1 == n {
            let rows: Vec<&[Fe]> = stack.iter().map(|&x| table.tail(x as usize)).chain([table.tail(v)]).collect();
            if !ctx.is_unit_image(tails_det(ctx, &rows)) {
                continue;
            }
        }
        stack.push(v as u32);
        out[size].extend_from_slice(stack);
        if size + 1 < max_size && size + 1 < n {
            let mut next = ech.clone();
            next.push(ctx, w);
            dfs(ctx, table, n, det_u, max_size, stack, &next, out);
        }
        stack.pop();
    }
}

/// Coefficient pairs `(λ, ν)` producing every apex class `[λx + νy]` exactly once.
fn apex_coefficients(ctx: &PrimeContext, kind: ComplexKind) -> Vec<(Fe, Fe)> {
    match kind {
        ComplexKind::BDA => ctx.unit_image().iter().map(|&u| (Fe::ONE, u)).collect(),
        ComplexKind::BA => ctx
            .cosets()
            .iter()
            .flat_map(|c| ctx.nonzero().map(move |nu| (c[0], nu)))
            .collect(),
        _ => Vec::new(),
    }
}

/// Build `B_{n,m}`, `BD_{n,m}`, `BA_{n,m}` or `BDA_{n,m}`.
pub fn build(ctx: &PrimeContext, kind: ComplexKind, n: usize, m: usize, opts: &BuildOptions) -> Result<SimplicialComplex> {
    if !matches!(kind, ComplexKind::B | ComplexKind::BD | ComplexKind::BA | ComplexKind::BDA) {
        return Err(Error::WrongComplexType {
            expected: "B, BD, BA or BDA".into(),
            found: kind.to_string(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let augmented = matches!(kind, ComplexKind::BA | ComplexKind::BDA);
    if augmented && n + m < 2 {
        return Err(Error::InvalidParameter("augmented complexes need n + m ≥ 2".into()));
    }
    let projected = projected_counts(ctx, kind, n, m, opts.max_dim);
    check_cap(&projected, opts.cap)?;
    let top = projected.len() - 1;

    let det_u = matches!(kind, ComplexKind::BD | ComplexKind::BDA);
    let mut table = VertexTable::new(ctx, n, m)?;
    if det_u && n == 1 {
        // a single vertex is a full-size simplex, so its tail must lie in U
        table.retain(|t| ctx.is_unit_image(t[0]));
    }
    let max_size = (top + 1).min(n);
    let standard = standard_simplices(ctx, &table, n, det_u, max_size, opts.parallel);

    let header = Header {
        kind,
        ring: Some(ctx.ring()),
        p: Some(ctx.p().to_string()),
        q: ctx.q(),
        n,
        m,
        max_dim: opts.max_dim,
    };
    let vertices = table.payloads();
    if !augmented {
        return Ok(SimplicialComplex::from_levels(header, vertices, standard, None));
    }

    let coeffs = apex_coefficients(ctx, kind);
    let width = n + m;
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    let mut labels: Vec<Vec<SimplexLabel>> = vec![Vec::new(); top + 1];
    for (s, data) in standard.iter().enumerate() {
        labels[s] = vec![SimplexLabel::Standard; data.len() / (s + 1)];
        levels[s] = data.clone();
    }
    // σ with s vertices yields augmented simplices with s + 1 vertices (dimension s)
    for s in 1..=top.min(n) {
        let sigmas = &standard[s - 1];
        let gen = |sigma: &[u32]| -> (Vec<u32>, Vec<SimplexLabel>) {
            let mut data = Vec::new();
            let mut labs = Vec::new();
            let mut apex = vec![Fe::ZERO; width];
            let mut emit = |apex_v: &[Fe], label: SimplexLabel, data: &mut Vec<u32>| {
                let a = table.index(ctx, apex_v).expect("apex has nonzero tail");
                let start = data.len();
                data.extend_from_slice(sigma);
                data.push(a);
                data[start..].sort_unstable();
                labs.push(label);
            };
            for (ix, &x) in sigma.iter().enumerate() {
                let xv = table.vector(x as usize);
                for &y in &sigma[ix + 1..] {
                    let yv = table.vector(y as usize);
                    for &(l, nu) in &coeffs {
                        for j in 0..width {
                            apex[j] = ctx.add(ctx.mul(l, xv[j]), ctx.mul(nu, yv[j]));
                        }
                        emit(&apex, SimplexLabel::InternallyAdditive, &mut data);
                    }
                }
                for e in 0..m {
                    for &(l, nu) in &coeffs {
                        for j in 0..width {
                            apex[j] = ctx.mul(l, xv[j]);
                        }
                        apex[e] = ctx.add(apex[e], nu);
                        emit(&apex, SimplexLabel::ExternallyAdditive, &mut data);
                    }
                }
            }
            (data, labs)
        };
        let chunks: Vec<&[u32]> = sigmas.chunks(s * 4096).collect();
        let run = |chunk: &&[u32]| -> (Vec<u32>, Vec<SimplexLabel>) {
            let mut d = Vec::new();
            let mut l = Vec::new();
            for sigma in chunk.chunks_exact(s) {
                let (a, b) = gen(sigma);
                d.extend(a);
                l.extend(b);
            }
            (d, l)
        };
        let parts: Vec<(Vec<u32>, Vec<SimplexLabel>)> = if opts.parallel {
            chunks.par_iter().map(run).collect()
        } else {
            chunks.iter().map(run).collect()
        };
        for (d, l) in parts {
            levels[s].extend(d);
            labels[s].extend(l);
        }
    }
    for s in 1..=top {
        let data = std::mem::take(&mut levels[s]);
        let labs = std::mem::take(&mut labels[s]);
        let (d, l) = sort_tuples(data, s + 1, Some(labs));
        levels[s] = d;
        labels[s] = l.unwrap();
    }
    Ok(SimplicialComplex::from_levels(header, vertices, levels, Some(labels)))
}

pub fn build_b(ctx: &PrimeContext, n: usize, m: usize, opts: &BuildOptions) -> Result<SimplicialComplex> {
    build(ctx, ComplexKind::B, n, m, opts)
}

pub fn build_bd(ctx: &PrimeContext, n: usize, m: usize, opts: &BuildOptions) -> Result<SimplicialComplex> {
    build(ctx, ComplexKind::BD, n, m, opts)
}

pub fn build_ba(ctx: &PrimeContext, n: usize, m: usize, opts: &BuildOptions) -> Result<SimplicialComplex> {
    build(ctx, ComplexKind::BA, n, m, opts)
}

pub fn build_bda(ctx: &PrimeContext, n: usize, m: usize, opts: &BuildOptions) -> Result<SimplicialComplex> {
    build(ctx, ComplexKind::BDA, n, m, opts)
}

/// Vertex payload of a U-vector complex as field elements.
pub fn vertex_vector(complex: &SimplicialComplex, v: usize) -> Vec<Fe> {
    complex.vertex(v).iter().map(|&x| Fe(x)).collect()
}

/// The simplices of `BD_n` or `BDA_n` (with `m = 0`) whose vectors span a proper subspace.
pub fn build_primed(complex: &SimplicialComplex, ctx: &PrimeContext) -> Result<SimplicialComplex> {
    let h = complex.header();
    let kind = match h.kind {
        ComplexKind::BD => ComplexKind::PrimedBD,
        ComplexKind::BDA => ComplexKind::PrimedBDA,
        other => {
            return Err(Error::WrongComplexType {
                expected: "BD or BDA".into(),
                found: other.to_string(),
            })
        }
    };
    if h.m != 0 {
        return Err(Error::InvalidParameter("primed subcomplexes are defined for m = 0".into()));
    }
    let n = h.n;
    Ok(complex.filter(kind, |_, s| {
        if s.len() < n {
            return true;
        }
        let rows: Vec<Vec<Fe>> = s.iter().map(|&v| vertex_vector(complex, v as usize)).collect();
        linalg::rank(ctx, &rows) < n
    }))
}

/// `[(1/d)(v_1 + ⋯ + v_n)]` for a basis `e_1, …, e_m, v_1, …, v_n` with determinant `d ∉ U`.
///
/// The result depends on the representatives `v_i`, not only on their
/// classes, so vectors are taken as given. Replacing any `v_i` by
/// `(1/d)(v_1 + ⋯ + v_n)` gives determinant exactly 1.
pub fn subdivision_vertex(ctx: &PrimeContext, m: usize, simplex: &[Vec<Fe>]) -> Result<UVectorClass> {
    let n = simplex.len();
    if n == 0 || simplex.iter().any(|v| v.len() != m + n) {
        return Err(Error::InvalidParameter(format!("need {n} vectors of length {}", m + n)));
    }
    let tails: Vec<&[Fe]> = simplex.iter().map(|v| &v[m..]).collect();
    let d = tails_det(ctx, &tails);
    if d.is_zero() {
        return Err(Error::Dependent);
    }
    if ctx.is_unit_image(d) {
        return Err(Error::AlreadyDeterminantU);
    }
    let dinv = ctx.inv(d);
    let mut sum = vec![Fe::ZERO; m + n];
    for v in simplex {
        for (s, &x) in sum.iter_mut().zip(v) {
            *s = ctx.add(*s, x);
        }
    }
    UVectorClass::new(ctx, sum.into_iter().map(|x| ctx.mul(x, dinv)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingElement, RingId};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn ctx(ring: RingId, a: i64, b: i64) -> PrimeContext {
        PrimeContext::new(ring, RingElement::from_i64(ring, a, b)).unwrap()
    }

    fn opts() -> BuildOptions {
        BuildOptions::default()
    }

    #[test]
    fn canonical_form_is_u_invariant() {
        let f = ctx(RingId::Gaussian, 3, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v: Vec<Fe> = (0..3).map(|_| Fe(rng.gen_range(0..9))).collect();
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            let c = UVectorClass::new(&f, v.clone()).unwrap();
            for &u in f.unit_image() {
                let w: Vec<Fe> = v.iter().map(|&x| f.mul(u, x)).collect();
                assert_eq!(UVectorClass::new(&f, w).unwrap(), c);
            }
        }
    }

    #[test]
    fn b2_small_counts() {
        let f3 = ctx(RingId::Integers, 3, 0);
        let b = build_b(&f3, 2, 0, &opts()).unwrap();
        assert_eq!(b.f_vector(), vec![4, 6]);
        let f5 = ctx(RingId::Integers, 5, 0);
        let b = build_b(&f5, 2, 0, &opts()).unwrap();
        assert_eq!(b.vertex_count(), 12);
        let b = build_b(&f5, 1, 2, &opts()).unwrap();
        assert_eq!(b.dim(), Some(0));
        assert_eq!(b.vertex_count(), 25 * 4 / 2);
    }

    fn brute_force_bd_top(f: &PrimeContext, n: usize) -> usize {
        // all ordered bases, classes counted via sets of canonical vectors
        let q = f.q() as u32;
        let total = (q as usize).pow((n * n) as u32);
        let mut seen = HashSet::new();
        for code in 0..total {
            let mut c = code;
            let rows: Vec<Vec<Fe>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let x = Fe((c % q as usize) as u32);
                            c /= q as usize;
                            x
                        })
                        .collect()
                })
                .collect();
            let d = linalg::det(f, &rows);
            if d.is_zero() || !f.is_unit_image(d) {
                continue;
            }
            let mut s: Vec<UVectorClass> = rows.into_iter().map(|r| UVectorClass::new(f, r).unwrap()).collect();
            s.sort();
            seen.insert(s);
        }
        seen.len()
    }

    #[test]
    fn bd2_counts_match_brute_force() {
        let f5 = ctx(RingId::Integers, 5, 0);
        let bd = build_bd(&f5, 2, 0, &opts()).unwrap();
        assert_eq!(bd.f_vector(), vec![12, 30]);
        assert_eq!(brute_force_bd_top(&f5, 2), 30);
        let f9 = ctx(RingId::Gaussian, 3, 0);
        let bd = build_bd(&f9, 2, 0, &opts()).unwrap();
        assert_eq!(bd.count(1), brute_force_bd_top(&f9, 2));
    }

    #[test]
    fn bd_equals_b_for_full_unit_image() {
        let f = ctx(RingId::Gaussian, 1, 2);
        for (n, m) in [(2, 0), (2, 1), (3, 0)] {
            let b = build_b(&f, n, m, &opts()).unwrap();
            let bd = build_bd(&f, n, m, &opts()).unwrap();
            assert_eq!(b.f_vector(), bd.f_vector());
            assert_eq!(b.level(n - 1), bd.level(n - 1));
        }
    }

    #[test]
    fn projections_are_exact() {
        for f in [ctx(RingId::Integers, 5, 0), ctx(RingId::Gaussian, 3, 0), ctx(RingId::Eisenstein, 2, 0)] {
            for kind in [ComplexKind::B, ComplexKind::BD, ComplexKind::BA, ComplexKind::BDA] {
                for (n, m) in [(1, 1), (2, 0), (2, 1), (3, 0)] {
                    if f.q() > 5 && n == 3 {
                        continue;
                    }
                    let c = build(&f, kind, n, m, &opts()).unwrap();
                    let proj: Vec<usize> = projected_counts(&f, kind, n, m, None).iter().map(|&x| x as usize).collect();
                    assert_eq!(c.f_vector(), proj, "{kind} n={n} m={m} q={}", f.q());
                    assert!(c.is_downward_closed());
                }
            }
        }
    }

    #[test]
    fn resource_cap_is_enforced() {
        let f = ctx(RingId::Integers, 5, 0);
        let r = build_bda(&f, 3, 1, &BuildOptions::default().with_cap(1000));
        assert!(matches!(r, Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn bda2_eisenstein_six_triangles_per_edge() {
        let f = ctx(RingId::Eisenstein, 1, 4);
        let c = build_bda(&f, 2, 0, &opts()).unwrap();
        let edges = c.count(1);
        let mut per_edge = vec![0usize; edges];
        for t in c.simplices(2) {
            for face in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                if let Some(i) = c.index_of(&face) {
                    per_edge[i] += 1;
                }
            }
        }
        // each det-U edge is the base {[v1],[v2]} of exactly |U| cores, and is
        // also a side of other cores; count only cores whose apex is [v1 + u v2]
        let mut based = vec![0usize; edges];
        for (i, e) in c.simplices(1).enumerate() {
            let x = vertex_vector(&c, e[0] as usize);
            let y = vertex_vector(&c, e[1] as usize);
            let mut apexes = HashSet::new();
            for &u in f.unit_image() {
                let w: Vec<Fe> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, f.mul(u, b))).collect();
                apexes.insert(UVectorClass::new(&f, w).unwrap());
            }
            based[i] = apexes.len();
            for a in apexes {
                let id = c.vertices().iter().position(|p| p.iter().map(|&z| Fe(z)).collect::<Vec<_>>() == a.coords()).unwrap() as u32;
                let mut t = vec![e[0], e[1], id];
                t.sort();
                assert!(c.contains(&t));
            }
        }
        assert!(based.iter().all(|&b| b == 6));
        assert_eq!(c.count(2), edges * 6 / 3);
        assert!(per_edge.iter().all(|&k| k == 6));
    }

    #[test]
    fn bda_equals_ba_for_full_unit_image() {
        let f = ctx(RingId::SqrtMinusTwo, 1, 1);
        let a = build_ba(&f, 2, 0, &opts()).unwrap();
        let b = build_bda(&f, 2, 0, &opts()).unwrap();
        assert_eq!(a.f_vector(), b.f_vector());
        for d in 0..=2 {
            assert_eq!(a.level(d), b.level(d));
        }
    }

    #[test]
    fn bda2_mod_3_cores() {
        let f = ctx(RingId::Integers, 3, 0);
        let c = build_bda(&f, 2, 0, &opts()).unwrap();
        for e in c.simplices(1) {
            let x = vertex_vector(&c, e[0] as usize);
            let y = vertex_vector(&c, e[1] as usize);
            for sign in [Fe::ONE, f.neg(Fe::ONE)] {
                let w: Vec<Fe> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, f.mul(sign, b))).collect();
                let w = UVectorClass::new(&f, w).unwrap();
                let id = (0..c.vertex_count()).find(|&v| vertex_vector(&c, v) == w.coords()).unwrap() as u32;
                let mut t = vec![e[0], e[1], id];
                t.sort();
                assert!(c.contains(&t));
            }
        }
    }

    #[test]
    fn bd_is_a_subcomplex_of_b_and_bda() {
        let f = ctx(RingId::Integers, 5, 0);
        for (n, m) in [(2, 0), (2, 1), (3, 0)] {
            let b = build_b(&f, n, m, &opts()).unwrap();
            let bd = build_bd(&f, n, m, &opts()).unwrap();
            let bda = build_bda(&f, n, m, &opts()).unwrap();
            assert_eq!(b.vertices(), bd.vertices());
            assert_eq!(bda.vertices(), bd.vertices());
            for d in 0..=bd.dim().unwrap() {
                for s in bd.simplices(d) {
                    assert!(b.contains(s));
                    let i = bda.index_of(s).unwrap();
                    assert_eq!(bda.label(d, i), Some(SimplexLabel::Standard));
                }
            }
            // removing the apex of an additive simplex leaves a simplex of BD
            for d in 1..=bda.dim().unwrap() {
                for (i, s) in bda.simplices(d).enumerate() {
                    if bda.label(d, i) == Some(SimplexLabel::Standard) {
                        assert!(bd.contains(s));
                        continue;
                    }
                    let any = (0..s.len()).any(|skip| {
                        let face: Vec<u32> = s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
                        bd.contains(&face)
                    });
                    assert!(any);
                }
            }
        }
    }

    #[test]
    fn primed_subcomplexes() {
        let f = ctx(RingId::Integers, 3, 0);
        let bda2 = build_bda(&f, 2, 0, &opts()).unwrap();
        let p = build_primed(&bda2, &f).unwrap();
        assert_eq!(p.f_vector(), vec![bda2.vertex_count()]);
        let bd3 = build_bd(&f, 3, 0, &opts()).unwrap();
        let p = build_primed(&bd3, &f).unwrap();
        assert_eq!(p.count(1), bd3.count(1));
        assert_eq!(p.count(2), 0);
        let bda3 = build_bda(&f, 3, 0, &opts()).unwrap();
        let p = build_primed(&bda3, &f).unwrap();
        assert_eq!(p.count(1), bda3.count(1));
        assert!(p.is_downward_closed());
        assert!(build_primed(&build_b(&f, 2, 0, &opts()).unwrap(), &f).is_err());
    }

    #[test]
    fn subdivision_vertex_example() {
        let f = ctx(RingId::Integers, 5, 0);
        let v1 = vec![Fe::ONE, Fe::ZERO];
        let v2 = vec![Fe::ZERO, f.from_int(2)];
        let w = subdivision_vertex(&f, 0, &[v1.clone(), v2.clone()]).unwrap();
        let want = UVectorClass::new(&f, vec![f.from_int(3), Fe::ONE]).unwrap();
        assert_eq!(w, want);
        let d = tails_det(&f, &[&[f.from_int(3), Fe::ONE], &v2]);
        assert_eq!(d, Fe::ONE);
        assert!(f.is_unit_image(tails_det(&f, &[w.coords(), &v2])));
        let e2 = vec![Fe::ZERO, Fe::ONE];
        assert_eq!(subdivision_vertex(&f, 0, &[v1.clone(), e2]), Err(Error::AlreadyDeterminantU));
        assert_eq!(subdivision_vertex(&f, 0, &[v1.clone(), v1]), Err(Error::Dependent));
    }

    #[test]
    fn subdivision_replacement_has_unit_determinant() {
        let f = ctx(RingId::Gaussian, 3, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 100 {
            let m = linalg::random_matrix(&f, 3, &mut rng);
            let d = linalg::det(&f, &m);
            if d.is_zero() || f.is_unit_image(d) {
                continue;
            }
            let w = subdivision_vertex(&f, 0, &m).unwrap();
            for i in 0..3 {
                let rows: Vec<&[Fe]> = (0..3).map(|j| if j == i { w.coords() } else { &m[j][..] }).collect();
                assert!(f.is_unit_image(tails_det(&f, &rows)));
            }
            checked += 1;
        }
    }

    /// The link of a k-simplex of `BD_{n,m}` maps onto `BD_{n−k−1, m+k+1}`
    /// under a determinant-U change of basis.
    #[test]
    fn links_are_smaller_bd_complexes() {
        let f = ctx(RingId::Integers, 5, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, m) in [(2, 0), (3, 0), (2, 1)] {
            let big = build_bd(&f, n, m, &opts()).unwrap();
            let width = n + m;
            for k in 0..n - 1 {
                for _ in 0..3 {
                    let idx = rng.gen_range(0..big.count(k));
                    let sigma = big.simplex(k, idx).to_vec();
                    let small = build_bd(&f, n - k - 1, m + k + 1, &opts()).unwrap();
                    // basis matrix: e_1..e_m, σ, completed to determinant 1
                    let mut cols: Vec<Vec<Fe>> = (0..m)
                        .map(|i| (0..width).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect())
                        .collect();
                    cols.extend(sigma.iter().map(|&v| vertex_vector(&big, v as usize)));
                    for j in 0..width {
                        if cols.len() == width {
                            break;
                        }
                        let e: Vec<Fe> = (0..width).map(|i| if i == j { Fe::ONE } else { Fe::ZERO }).collect();
                        let mut trial = cols.clone();
                        trial.push(e.clone());
                        if linalg::rank(&f, &trial) == trial.len() {
                            cols.push(e);
                        }
                    }
                    let d = linalg::det(&f, &cols);
                    let last = cols.len() - 1;
                    let dinv = f.inv(d);
                    for x in cols[last].iter_mut() {
                        *x = f.mul(*x, dinv);
                    }
                    // A has these columns; vertices map by A⁻¹
                    let a = linalg::transpose(&cols);
                    let ainv = inverse(&f, &a);
                    let image = |v: u32| -> u32 {
                        let x = vertex_vector(&big, v as usize);
                        let col: Vec<Vec<Fe>> = x.iter().map(|&t| vec![t]).collect();
                        let y: Vec<Fe> = linalg::mat_mul(&f, &ainv, &col).into_iter().map(|r| r[0]).collect();
                        let y = UVectorClass::new(&f, y).unwrap();
                        (0..small.vertex_count()).find(|&w| vertex_vector(&small, w) == y.coords()).expect("link vertex maps to a vertex") as u32
                    };
                    // link simplices
                    let mut link: Vec<Vec<u32>> = Vec::new();
                    for d in 0..=big.dim().unwrap() {
                        for s in big.simplices(d) {
                            if s.iter().any(|v| sigma.contains(v)) {
                                continue;
                            }
                            let mut join: Vec<u32> = s.iter().chain(&sigma).copied().collect();
                            join.sort();
                            if big.contains(&join) {
                                let mut img: Vec<u32> = s.iter().map(|&v| image(v)).collect();
                                img.sort();
                                link.push(img);
                            }
                        }
                    }
                    assert_eq!(link.len(), small.total_simplices());
                    for s in &link {
                        assert!(small.contains(s));
                    }
                }
            }
        }
    }

    fn inverse(f: &PrimeContext, a: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
        let n = a.len();
        let aug: Vec<Vec<Fe>> = a
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().copied().chain((0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO })).collect())
            .collect();
        let (r, _) = linalg::rref(f, &aug);
        r.into_iter().map(|row| row[n..].to_vec()).collect()
    }
}
