//! Smith normal form of sparse integer matrices.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest dense block (rows × columns) left after unit-pivot elimination.
pub const DENSE_CAP: u64 = 4_000_000;

/// A sparse integer matrix stored by columns.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<BTreeMap<u32, BigInt>>,
}

impl SparseMatrix {
    pub fn new(rows: usize) -> Self {
        SparseMatrix { rows, cols: Vec::new() }
    }

    pub fn push_column(&mut self, entries: impl IntoIterator<Item = (u32, i64)>) {
        let mut col = BTreeMap::new();
        for (r, v) in entries {
            assert!((r as usize) < self.rows, "row {r} out of range");
            let e = col.entry(r).or_insert_with(BigInt::zero);
            *e += v;
            if e.is_zero() {
                col.remove(&r);
            }
        }
        self.cols.push(col);
    }
}

/// Nonzero invariant factors `d_1 | d_2 | …`, all positive.
pub fn invariant_factors(m: &SparseMatrix) -> Result<Vec<BigInt>> {
    let mut cols: Vec<BTreeMap<u32, BigInt>> = m.cols.iter().filter(|c| !c.is_empty()).cloned().collect();
    let mut factors: Vec<BigInt> = Vec::new();

    // row -> set of columns holding an entry there
    let mut row_index: HashMap<u32, BTreeMap<usize, ()>> = HashMap::new();
    for (j, c) in cols.iter().enumerate() {
        for &r in c.keys() {
            row_index.entry(r).or_default().insert(j, ());
        }
    }
    let mut alive = vec![true; cols.len()];

    // Eliminate unit pivots, shortest columns first.
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.sort_by_key(|&j| cols[j].len());
    let mut progress = true;
    while progress {
        progress = false;
        for &c in &order {
            if !alive[c] {
                continue;
            }
            let Some((&r, u)) = cols[c].iter().filter(|(_, v)| v.abs().is_one()).min_by_key(|(r, _)| row_index[r].len()) else {
                continue;
            };
            let u = u.clone();
            let pivot_col = std::mem::take(&mut cols[c]);
            alive[c] = false;
            for &r2 in pivot_col.keys() {
                if let Some(s) = row_index.get_mut(&r2) {
                    s.remove(&c);
                }
            }
            let others: Vec<usize> = row_index.get(&r).map(|s| s.keys().copied().collect()).unwrap_or_default();
            for j in others {
                // col_j −= (a_rj / u) · pivot
                let f = &cols[j][&r] * &u;
                for (&r2, v) in &pivot_col {
                    let e = cols[j].entry(r2).or_insert_with(BigInt::zero);
                    let was_zero = e.is_zero();
                    *e -= &f * v;
                    if e.is_zero() {
                        cols[j].remove(&r2);
                        if !was_zero {
                            row_index.get_mut(&r2).unwrap().remove(&j);
                        }
                    } else if was_zero {
                        row_index.entry(r2).or_default().insert(j, ());
                    }
                }
                debug_assert!(!cols[j].contains_key(&r));
                if cols[j].is_empty() {
                    alive[j] = false;
                }
            }
            row_index.remove(&r);
            factors.push(BigInt::one());
            progress = true;
        }
    }

    // Dense remainder.
    let live: Vec<usize> = (0..cols.len()).filter(|&j| alive[j] && !cols[j].is_empty()).collect();
    let mut row_ids: Vec<u32> = live.iter().flat_map(|&j| cols[j].keys().copied()).collect();
    row_ids.sort_unstable();
    row_ids.dedup();
    let size = row_ids.len() as u64 * live.len() as u64;
    if size > DENSE_CAP {
        return Err(Error::ResourceCap {
            projected: size as u128,
            cap: DENSE_CAP,
        });
    }
    if !live.is_empty() {
        let pos: HashMap<u32, usize> = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut a = vec![vec![BigInt::zero(); live.len()]; row_ids.len()];
        for (jj, &j) in live.iter().enumerate() {
            for (r, v) in &cols[j] {
                a[pos[r]][jj] = v.clone();
            }
        }
        factors.extend(dense_diagonal(a));
    }
    Ok(normalize(factors))
}

/// Diagonalize a dense matrix by gcd row and column operations.
fn dense_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&p);
                for j in t..cols {
                    let s = &f * &a[t][j];
                    a[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let s = &f * &row[t];
                    row[j] -= s;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // move the smallest remaining entry of row t / column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.1 == t {
                a.swap(t, best.0);
            } else {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Turn a diagonal into the divisibility chain with the same cokernel.
fn normalize(mut d: Vec<BigInt>) -> Vec<BigInt> {
    d.retain(|x| !x.is_zero());
    for x in d.iter_mut() {
        *x = x.abs();
    }
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Rank and torsion (factors above 1) of an integer matrix.
pub fn rank_and_torsion(m: &SparseMatrix) -> Result<(usize, Vec<BigInt>)> {
    let f = invariant_factors(m)?;
    let rank = f.len();
    Ok((rank, f.into_iter().filter(|x| !x.is_one()).collect()))
}
