//! Ranks of simplicial boundary maps.
//!
//! Every routine also returns an independent set of columns of maximal size,
//! which seeds the propagation certificate one degree up.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;

/// A prime just below 2³¹, so products fit in `u64`.
pub const MODULAR_PRIME: u64 = 2_147_483_629;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankMethod {
    /// Rank of the augmentation.
    Augmentation,
    /// Spanning forest of the 1-skeleton.
    UnionFind,
    /// Every face resolved by a triangular set of columns: the rank meets its upper bound.
    Propagation,
    /// Elimination modulo a large prime reached the upper bound, which is then exact over Q.
    ModularCertified,
    /// Fraction-free elimination over Z.
    Exact,
    /// No columns.
    Empty,
}

#[derive(Clone, Debug)]
pub struct BoundaryRank {
    pub rank: usize,
    pub method: RankMethod,
    /// Indices of k-simplices whose boundaries are independent; `rank` of them.
    pub basis: Vec<u32>,
}

/// Sorted `(row, ±1)` entries of `∂` applied to the i-th d-simplex.
pub fn boundary_column(c: &SimplicialComplex, d: usize, i: usize) -> Vec<(u32, i64)> {
    let s = c.simplex(d, i);
    let mut face = Vec::with_capacity(d);
    let mut out = Vec::with_capacity(d + 1);
    for skip in 0..=d {
        face.clear();
        face.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
        let row = c.index_of(&face).expect("complex is downward closed") as u32;
        out.push((row, if skip % 2 == 0 { 1 } else { -1 }));
    }
    out.sort_unstable_by_key(|e| e.0);
    out
}

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if self.rank[ra as usize] < self.rank[rb as usize] { (ra, rb) } else { (rb, ra) };
        self.parent[lo as usize] = hi;
        if self.rank[lo as usize] == self.rank[hi as usize] {
            self.rank[hi as usize] += 1;
        }
        true
    }
}

/// Connected components of the 1-skeleton, as a component id per vertex.
pub fn components(c: &SimplicialComplex) -> (usize, Vec<u32>) {
    let mut uf = UnionFind::new(c.vertex_count());
    for e in c.simplices(1) {
        uf.union(e[0], e[1]);
    }
    let mut ids = vec![u32::MAX; c.vertex_count()];
    let mut next = 0u32;
    let mut comp = Vec::with_capacity(c.vertex_count());
    for v in 0..c.vertex_count() as u32 {
        let r = uf.find(v) as usize;
        if ids[r] == u32::MAX {
            ids[r] = next;
            next += 1;
        }
        comp.push(ids[r]);
    }
    (next as usize, comp)
}

pub fn rank_d1(c: &SimplicialComplex) -> BoundaryRank {
    let mut uf = UnionFind::new(c.vertex_count());
    let mut basis = Vec::new();
    for (i, e) in c.simplices(1).enumerate() {
        if uf.union(e[0], e[1]) {
            basis.push(i as u32);
        }
    }
    BoundaryRank {
        rank: basis.len(),
        method: RankMethod::UnionFind,
        basis,
    }
}

/// Try to show `rank ∂_d = n_{d−1} − |prev|` where `prev` indexes (d−1)-simplices
/// with independent boundaries.
///
/// Starting from `prev`, a d-simplex with exactly one unresolved face resolves
/// that face. The d-simplices used this way have a triangular ±1 submatrix on
/// the complement of `prev`, so if every face gets resolved they are independent
/// and `C_{d−1} = span(prev) + im ∂_d`.
pub fn propagate(c: &SimplicialComplex, d: usize, prev: &[u32]) -> Option<Vec<u32>> {
    let rows = c.count(d - 1);
    let cols = c.count(d);
    let mut resolved = vec![false; rows];
    for &r in prev {
        resolved[r as usize] = true;
    }
    let mut remaining = rows - prev.len();
    if remaining == 0 {
        return Some(Vec::new());
    }
    if cols < remaining {
        return None;
    }
    // coface lists in CSR form
    let faces: Vec<u32> = (0..cols).flat_map(|j| boundary_column(c, d, j).into_iter().map(|(r, _)| r)).collect();
    let w = d + 1;
    let mut start = vec![0u32; rows + 1];
    for &r in &faces {
        start[r as usize + 1] += 1;
    }
    for i in 0..rows {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut cofaces = vec![0u32; faces.len()];
    for (k, &r) in faces.iter().enumerate() {
        cofaces[fill[r as usize] as usize] = (k / w) as u32;
        fill[r as usize] += 1;
    }
    let mut open: Vec<u8> = (0..cols)
        .map(|j| faces[j * w..(j + 1) * w].iter().filter(|&&r| !resolved[r as usize]).count() as u8)
        .collect();
    let mut stack: Vec<u32> = (0..cols as u32).filter(|&j| open[j as usize] == 1).collect();
    let mut used = Vec::with_capacity(remaining);
    while let Some(j) = stack.pop() {
        if open[j as usize] != 1 {
            continue;
        }
        let j = j as usize;
        let r = *faces[j * w..(j + 1) * w].iter().find(|&&r| !resolved[r as usize]).unwrap();
        resolved[r as usize] = true;
        remaining -= 1;
        used.push(j as u32);
        for &t in &cofaces[start[r as usize] as usize..start[r as usize + 1] as usize] {
            open[t as usize] -= 1;
            if open[t as usize] == 1 {
                stack.push(t);
            }
        }
        if remaining == 0 {
            return Some(used);
        }
    }
    None
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Column reduction of `∂_d` modulo `p`, stopping once `bound` pivots are found.
pub fn rank_mod_p(c: &SimplicialComplex, d: usize, bound: usize, p: u64) -> (usize, Vec<u32>) {
    eliminate_mod_p(c.count(d - 1), c.count(d), |j| boundary_column(c, d, j), bound, p)
}

/// Rank modulo `p` of an integer matrix given column by column; returns the
/// indices of independent columns.
pub fn eliminate_mod_p(
    rows: usize,
    cols: usize,
    column: impl Fn(usize) -> Vec<(u32, i64)>,
    bound: usize,
    p: u64,
) -> (usize, Vec<u32>) {
    let mut pivot_of_row = vec![u32::MAX; rows];
    let mut stored: Vec<Vec<(u32, u64)>> = Vec::new();
    let mut basis = Vec::new();
    let mut scratch: Vec<(u32, u64)> = Vec::new();
    for j in 0..cols {
        if basis.len() >= bound {
            break;
        }
        let mut col: Vec<(u32, u64)> = column(j)
            .into_iter()
            .map(|(r, s)| (r, s.rem_euclid(p as i64) as u64))
            .filter(|e| e.1 != 0)
            .collect();
        while let Some(&(low, v)) = col.last() {
            let pid = pivot_of_row[low as usize];
            if pid == u32::MAX {
                let inv = inv_mod(v, p);
                for e in col.iter_mut() {
                    e.1 = e.1 * inv % p;
                }
                pivot_of_row[low as usize] = stored.len() as u32;
                stored.push(col);
                basis.push(j as u32);
                break;
            }
            // col −= v · pivot column (whose low entry is 1)
            let piv = &stored[pid as usize];
            scratch.clear();
            let (mut a, mut b) = (0, 0);
            while a < col.len() || b < piv.len() {
                let ra = col.get(a).map_or(u32::MAX, |e| e.0);
                let rb = piv.get(b).map_or(u32::MAX, |e| e.0);
                if ra < rb {
                    scratch.push(col[a]);
                    a += 1;
                } else if rb < ra {
                    scratch.push((rb, (p - piv[b].1 * v % p) % p));
                    b += 1;
                } else {
                    let x = (col[a].1 + p - piv[b].1 * v % p) % p;
                    if x != 0 {
                        scratch.push((ra, x));
                    }
                    a += 1;
                    b += 1;
                }
            }
            std::mem::swap(&mut col, &mut scratch);
        }
    }
    (basis.len(), basis)
}

/// Integer coefficients for fraction-free elimination; `None` signals overflow.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(x: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `a·x − b·y`.
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Coeff for i64 {
    fn from_i64(x: i64) -> Self {
        x
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }

    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }

    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }

    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl Coeff for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }

    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }

    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

/// Fraction-free column reduction over Z. Each reduced column is divided by
/// the gcd of its entries, which keeps entries small on boundary matrices.
pub fn rank_exact_with<C: Coeff>(c: &SimplicialComplex, d: usize, bound: usize) -> Option<(usize, Vec<u32>)> {
    eliminate_exact::<C>(c.count(d - 1), c.count(d), &|j| boundary_column(c, d, j), bound)
}

/// Fraction-free rank over Z of a matrix given column by column; columns must
/// have sorted rows.
pub fn eliminate_exact<C: Coeff>(
    rows: usize,
    cols: usize,
    column: &dyn Fn(usize) -> Vec<(u32, i64)>,
    bound: usize,
) -> Option<(usize, Vec<u32>)> {
    let mut pivot_of_row = vec![u32::MAX; rows];
    let mut stored: Vec<Vec<(u32, C)>> = Vec::new();
    let mut basis = Vec::new();
    for j in 0..cols {
        if basis.len() >= bound {
            break;
        }
        let mut col: Vec<(u32, C)> = column(j)
            .into_iter()
            .filter(|e| e.1 != 0)
            .map(|(r, s)| (r, C::from_i64(s)))
            .collect();
        while let Some((low, v)) = col.last().cloned() {
            let pid = pivot_of_row[low as usize];
            if pid == u32::MAX {
                pivot_of_row[low as usize] = stored.len() as u32;
                stored.push(col);
                basis.push(j as u32);
                break;
            }
            let piv = &stored[pid as usize];
            let pv = piv.last().unwrap().1.clone();
            let g = v.gcd(&pv);
            let (a, b) = (pv.div_exact(&g), v.div_exact(&g));
            // col ← a·col − b·piv
            let zero = C::from_i64(0);
            let mut next = Vec::with_capacity(col.len() + piv.len());
            let (mut i, mut k) = (0, 0);
            while i < col.len() || k < piv.len() {
                let ri = col.get(i).map_or(u32::MAX, |e| e.0);
                let rk = piv.get(k).map_or(u32::MAX, |e| e.0);
                let (row, x, y) = if ri < rk {
                    i += 1;
                    (ri, &col[i - 1].1, &zero)
                } else if rk < ri {
                    k += 1;
                    (rk, &zero, &piv[k - 1].1)
                } else {
                    i += 1;
                    k += 1;
                    (ri, &col[i - 1].1, &piv[k - 1].1)
                };
                let z = C::combine(&a, x, &b, y)?;
                if !z.is_zero() {
                    next.push((row, z));
                }
            }
            let content = next.iter().fold(C::from_i64(0), |g, e| g.gcd(&e.1));
            if !content.is_zero() && !content.is_unit() {
                for e in next.iter_mut() {
                    e.1 = e.1.div_exact(&content);
                }
            }
            col = next;
        }
    }
    Some((basis.len(), basis))
}

/// Exact rank over Q of sparse integer columns (rows sorted within each column).
/// `upper_bound`, when given, must bound the rank from above; reaching it
/// modulo a prime then certifies the rank without exact elimination.
pub fn columns_rank(rows: usize, columns: &[Vec<(u32, i64)>], upper_bound: Option<usize>) -> usize {
    let bound = upper_bound.unwrap_or(usize::MAX).min(columns.len());
    let (r, _) = eliminate_mod_p(rows, columns.len(), |j| columns[j].clone(), bound, MODULAR_PRIME);
    if r == bound {
        return r;
    }
    let f = |j: usize| columns[j].clone();
    eliminate_exact::<i64>(rows, columns.len(), &f, usize::MAX)
        .or_else(|| eliminate_exact::<BigInt>(rows, columns.len(), &f, usize::MAX))
        .expect("big integers do not overflow")
        .0
}

pub fn rank_exact(c: &SimplicialComplex, d: usize, bound: usize) -> (usize, Vec<u32>) {
    rank_exact_with::<i64>(c, d, bound).unwrap_or_else(|| rank_exact_with::<BigInt>(c, d, bound).expect("big integers do not overflow"))
}

/// Rank of `∂_d : C_d → C_{d−1}` for `d ≥ 1`, given an independent set of
/// (d−1)-simplices of maximal size from the degree below.
pub fn boundary_rank(c: &SimplicialComplex, d: usize, prev: &[u32], use_modular: bool) -> BoundaryRank {
    if d == 1 {
        return rank_d1(c);
    }
    let cols = c.count(d);
    if cols == 0 {
        return BoundaryRank {
            rank: 0,
            method: RankMethod::Empty,
            basis: Vec::new(),
        };
    }
    let bound = (c.count(d - 1) - prev.len()).min(cols);
    if let Some(used) = propagate(c, d, prev) {
        return BoundaryRank {
            rank: used.len(),
            method: RankMethod::Propagation,
            basis: used,
        };
    }
    if use_modular {
        let (r, basis) = rank_mod_p(c, d, bound, MODULAR_PRIME);
        if r == bound {
            return BoundaryRank {
                rank: r,
                method: RankMethod::ModularCertified,
                basis,
            };
        }
    }
    let (r, basis) = rank_exact(c, d, bound);
    BoundaryRank {
        rank: r,
        method: RankMethod::Exact,
        basis,
    }
}
