//! Dense linear algebra over a tabulated residue field, and the constructive
//! lift `SL_n(F) → SL_n(R)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeContext};
use crate::ring::RingElement;

pub type FMatrix = Vec<Vec<Fe>>;
pub type RMatrix = Vec<Vec<RingElement>>;

pub fn identity(n: usize) -> FMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect())
        .collect()
}

pub fn transpose(m: &[Vec<Fe>]) -> FMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn mat_mul(ctx: &PrimeContext, a: &[Vec<Fe>], b: &[Vec<Fe>]) -> FMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Fe::ZERO, |acc, k| ctx.add(acc, ctx.mul(row[k], b[k][j])))
                })
                .collect()
        })
        .collect()
}

/// Determinant of a square matrix by elimination.
pub fn det(ctx: &PrimeContext, m: &[Vec<Fe>]) -> Fe {
    let n = m.len();
    let mut a: FMatrix = m.to_vec();
    let mut d = Fe::ONE;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Fe::ZERO;
        };
        if piv != k {
            a.swap(piv, k);
            d = ctx.neg(d);
        }
        let p = a[k][k];
        d = ctx.mul(d, p);
        let pinv = ctx.inv(p);
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = ctx.mul(a[i][k], pinv);
            for j in k..n {
                let t = ctx.mul(f, a[k][j]);
                a[i][j] = ctx.sub(a[i][j], t);
            }
        }
    }
    d
}

/// Reduced row echelon form of the row space; returns the nonzero rows and their pivot columns.
pub fn rref(ctx: &PrimeContext, m: &[Vec<Fe>]) -> (FMatrix, Vec<usize>) {
    let mut a: FMatrix = m.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(piv, r);
        let inv = ctx.inv(a[r][c]);
        for j in 0..cols {
            a[r][j] = ctx.mul(a[r][j], inv);
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let t = ctx.mul(f, a[r][j]);
                    a[i][j] = ctx.sub(a[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

/// Rank of the row space.
pub fn rank(ctx: &PrimeContext, rows: &[Vec<Fe>]) -> usize {
    rref(ctx, rows).1.len()
}

pub fn random_matrix<R: Rng>(ctx: &PrimeContext, n: usize, rng: &mut R) -> FMatrix {
    let q = ctx.q() as u32;
    (0..n).map(|_| (0..n).map(|_| Fe(rng.gen_range(0..q))).collect()).collect()
}

/// A uniformly random element of `SL_n(F)`.
pub fn random_sl<R: Rng>(ctx: &PrimeContext, n: usize, rng: &mut R) -> FMatrix {
    loop {
        let mut m = random_matrix(ctx, n, rng);
        let d = det(ctx, &m);
        if d.is_zero() {
            continue;
        }
        let dinv = ctx.inv(d);
        for x in m[0].iter_mut() {
            *x = ctx.mul(*x, dinv);
        }
        return m;
    }
}

/// Determinant over R by cofactor expansion along the first row.
pub fn det_ring(m: &[Vec<RingElement>]) -> RingElement {
    let n = m.len();
    assert!(n > 0, "determinant of an empty matrix");
    if n == 1 {
        return m[0][0].clone();
    }
    let ring = m[0][0].ring();
    let mut acc = ring.zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: RMatrix = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * &det_ring(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// A row operation `row_i += a · row_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Elementary {
    pub i: usize,
    pub j: usize,
    pub a: Fe,
}

/// Write a determinant-one matrix as a product of elementary matrices.
///
/// Returns operations `E_1, …, E_k` with `E_k ⋯ E_1 · M = I`. Every pivot is
/// brought to 1 by adding a multiple of a lower row, so no diagonal factor is
/// left over: after the first `n − 1` columns are cleared, the last pivot equals
/// `det M = 1`.
pub fn elementary_reduction(ctx: &PrimeContext, m: &[Vec<Fe>]) -> Result<Vec<Elementary>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    if n == 0 || det(ctx, m) != Fe::ONE {
        return Err(Error::NotSpecialLinear);
    }
    let mut a: FMatrix = m.to_vec();
    let mut ops = Vec::new();
    let apply = |a: &mut FMatrix, i: usize, j: usize, c: Fe, ops: &mut Vec<Elementary>| {
        if c.is_zero() {
            return;
        }
        for col in 0..n {
            let t = ctx.mul(c, a[j][col]);
            a[i][col] = ctx.add(a[i][col], t);
        }
        ops.push(Elementary { i, j, a: c });
    };
    for k in 0..n {
        if k + 1 < n {
            if a[k][k].is_zero() {
                let src = (k + 1..n).find(|&i| !a[i][k].is_zero()).expect("matrix is invertible");
                apply(&mut a, k, src, Fe::ONE, &mut ops);
            }
            if a[k][k] != Fe::ONE {
                if a[k + 1][k].is_zero() {
                    apply(&mut a, k + 1, k, Fe::ONE, &mut ops);
                }
                let c = ctx.div(ctx.sub(Fe::ONE, a[k][k]), a[k + 1][k]);
                apply(&mut a, k, k + 1, c, &mut ops);
            }
        }
        debug_assert_eq!(a[k][k], Fe::ONE);
        for i in 0..n {
            if i != k {
                let c = ctx.neg(a[i][k]);
                apply(&mut a, i, k, c, &mut ops);
            }
        }
    }
    debug_assert_eq!(a, identity(n));
    Ok(ops)
}

/// Lift `M ∈ SL_n(F)` to `A ∈ SL_n(R)` with `A ≡ M (mod p)`.
///
/// `M = E_1(−a_1) ⋯ E_k(−a_k)`; each `−a_t` is replaced by its canonical
/// representative, and the product of elementary matrices over R has
/// determinant exactly 1.
pub fn lift_sl_matrix(ctx: &PrimeContext, m: &[Vec<Fe>]) -> Result<RMatrix> {
    let n = m.len();
    let ops = elementary_reduction(ctx, m)?;
    let ring = ctx.ring();
    let mut out: RMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect();
    for op in &ops {
        // right multiplication by E_ij(c): column j += c · column i
        let c = ctx.rep(ctx.neg(op.a)).clone();
        for row in out.iter_mut() {
            let t = &row[op.i] * &c;
            row[op.j] = &row[op.j] + &t;
        }
    }
    Ok(out)
}

pub fn reduce_matrix(ctx: &PrimeContext, m: &[Vec<RingElement>]) -> FMatrix {
    m.iter().map(|row| row.iter().map(|x| ctx.reduce(x)).collect()).collect()
}
