//! Edge-path presentations of the fundamental group, Tietze simplification
//! and bounded coset enumeration.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::snf::{invariant_factors, SparseMatrix};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

pub const DEFAULT_EFFORT: usize = 1_000_000;

/// A letter is `g + 1` for generator `g` and `−(g + 1)` for its inverse.
pub type Word = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relators: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupVerdict {
    Trivial,
    Nontrivial,
    Unknown,
}

impl std::fmt::Display for GroupVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupVerdict::Trivial => "trivial",
            GroupVerdict::Nontrivial => "nontrivial",
            GroupVerdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialityReport {
    pub verdict: GroupVerdict,
    /// Free rank and torsion of the abelianization.
    pub abelian_rank: usize,
    pub abelian_torsion: Vec<String>,
    /// The presentation after Tietze simplification.
    pub simplified: GroupPresentation,
    /// Cosets in the closed table, when enumeration finished.
    pub index: Option<usize>,
    pub table_rows: usize,
}

impl GroupPresentation {
    pub fn validate(&self) -> bool {
        self.relators
            .iter()
            .flatten()
            .all(|&l| l != 0 && (l.unsigned_abs() as usize) <= self.generators)
    }

    /// Exponent-sum matrix, one column per relator.
    pub fn abelianization(&self) -> Result<(usize, Vec<BigInt>)> {
        let mut m = SparseMatrix::new(self.generators);
        for r in &self.relators {
            m.push_column(r.iter().map(|&l| (l.unsigned_abs() - 1, l.signum() as i64)));
        }
        let f = invariant_factors(&m)?;
        let free = self.generators - f.len();
        Ok((free, f.into_iter().filter(|x| !x.is_one()).collect()))
    }
}

fn free_reduce(w: &mut Word) {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w.iter() {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    // cyclic reduction
    let mut s = 0;
    let mut e = out.len();
    while e - s >= 2 && out[s] == -out[e - 1] {
        s += 1;
        e -= 1;
    }
    *w = out[s..e].to_vec();
}

fn invert(w: &[i32]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

/// Canonical cyclic form of a relator up to rotation and inversion, for deduplication.
fn cyclic_key(w: &[i32]) -> Word {
    let mut best: Option<Word> = None;
    for cand in [w.to_vec(), invert(w)] {
        for k in 0..cand.len().max(1) {
            let mut r = cand[k..].to_vec();
            r.extend_from_slice(&cand[..k]);
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    best.unwrap_or_default()
}

/// Edge-path group of the 2-skeleton based at `basepoint`.
///
/// Generators are the edges outside a breadth-first spanning tree; each
/// triangle `[a < b < c]` gives the relator `g(ab)·g(bc)·g(ac)⁻¹`.
pub fn fundamental_group(c: &SimplicialComplex, basepoint: usize) -> Result<GroupPresentation> {
    let n = c.vertex_count();
    if n == 0 {
        return Err(Error::EmptyComplex);
    }
    if basepoint >= n {
        return Err(Error::InvalidParameter(format!("basepoint {basepoint} out of range")));
    }
    let adj = c.adjacency();
    let mut seen = vec![false; n];
    let mut tree: HashSet<(u32, u32)> = HashSet::new();
    let mut queue = VecDeque::from([basepoint as u32]);
    seen[basepoint] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                tree.insert((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Disconnected);
    }
    let mut gen_of: HashMap<(u32, u32), i32> = HashMap::new();
    for e in c.simplices(1) {
        let key = (e[0], e[1]);
        if !tree.contains(&key) {
            let g = gen_of.len() as i32 + 1;
            gen_of.insert(key, g);
        }
    }
    let letter = |a: u32, b: u32| gen_of.get(&(a, b)).copied();
    let relators = c
        .simplices(2)
        .map(|t| {
            let mut w = Vec::with_capacity(3);
            w.extend(letter(t[0], t[1]));
            w.extend(letter(t[1], t[2]));
            w.extend(letter(t[0], t[2]).map(|g| -g));
            w
        })
        .collect();
    Ok(GroupPresentation {
        generators: gen_of.len(),
        relators,
    })
}

/// Tietze simplification: free and cyclic reduction, deduplication, and
/// elimination of generators occurring exactly once in a short relator.
pub fn simplify(p: &GroupPresentation) -> GroupPresentation {
    let mut rels: Vec<Word> = p.relators.clone();
    let mut alive = vec![true; p.generators + 1];
    let max_len = 2 * rels.iter().map(Vec::len).max().unwrap_or(0).max(8);
    loop {
        let mut seen = HashSet::new();
        rels = rels
            .into_iter()
            .filter_map(|mut w| {
                free_reduce(&mut w);
                (!w.is_empty() && seen.insert(cyclic_key(&w))).then_some(w)
            })
            .collect();
        // occurrences of each generator: (relator, position) when it appears once overall in that relator
        let mut pick: Option<(usize, usize, usize)> = None;
        for (ri, w) in rels.iter().enumerate() {
            if pick.is_some_and(|(_, _, len)| w.len() >= len) {
                continue;
            }
            let mut count: HashMap<u32, (usize, usize)> = HashMap::new();
            for (pos, &l) in w.iter().enumerate() {
                let e = count.entry(l.unsigned_abs()).or_insert((0, pos));
                e.0 += 1;
            }
            if let Some((_, &(_, pos))) = count.iter().filter(|(_, &(k, _))| k == 1).min_by_key(|(g, _)| **g) {
                pick = Some((ri, pos, w.len()));
            }
        }
        let Some((ri, pos, len)) = pick else { break };
        if len > max_len {
            break;
        }
        // r = A·x^ε·B = 1  ⇒  x^ε = A⁻¹·B⁻¹, i.e. x = (B·A)^{−ε}
        let w = rels.swap_remove(ri);
        let x = w[pos];
        let g = x.unsigned_abs();
        let mut ba: Word = w[pos + 1..].to_vec();
        ba.extend_from_slice(&w[..pos]);
        let image = if x > 0 { invert(&ba) } else { ba };
        let image_inv = invert(&image);
        alive[g as usize] = false;
        for r in rels.iter_mut() {
            if !r.iter().any(|l| l.unsigned_abs() == g) {
                continue;
            }
            let mut out = Vec::with_capacity(r.len() + image.len());
            for &l in r.iter() {
                if l == g as i32 {
                    out.extend_from_slice(&image);
                } else if l == -(g as i32) {
                    out.extend_from_slice(&image_inv);
                } else {
                    out.push(l);
                }
            }
            *r = out;
        }
    }
    // renumber surviving generators
    let mut new_id = vec![0i32; p.generators + 1];
    let mut next = 0;
    for g in 1..=p.generators {
        if alive[g] {
            next += 1;
            new_id[g] = next;
        }
    }
    let relators = rels
        .into_iter()
        .map(|w| w.into_iter().map(|l| l.signum() * new_id[l.unsigned_abs() as usize]).collect())
        .collect();
    GroupPresentation {
        generators: next as usize,
        relators,
    }
}

const NONE: u32 = u32::MAX;

struct CosetTable {
    width: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    limit: usize,
    queue: Vec<u32>,
}

impl CosetTable {
    fn col(l: i32) -> usize {
        let g = l.unsigned_abs() as usize - 1;
        2 * g + usize::from(l < 0)
    }

    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.width + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.width + x] = d;
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn define(&mut self, c: u32, x: usize) -> bool {
        if self.rows() >= self.limit {
            return false;
        }
        let d = self.rows() as u32;
        self.table.extend(std::iter::repeat_n(NONE, self.width));
        self.parent.push(d);
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        true
    }

    fn rep(&mut self, mut c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[c as usize] != root {
            let next = self.parent[c as usize];
            self.parent[c as usize] = root;
            c = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi as usize] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.width {
                let f = self.get(e, x);
                if f == NONE {
                    continue;
                }
                if self.get(f, x ^ 1) == e {
                    self.set(f, x ^ 1, NONE);
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                let ex = self.get(e1, x);
                if ex != NONE {
                    let t = self.rep(ex);
                    self.merge(f1, t);
                } else {
                    let fx = self.get(f1, x ^ 1);
                    if fx != NONE {
                        let t = self.rep(fx);
                        self.merge(e1, t);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Returns false when the table is full.
    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> bool {
        if w.is_empty() {
            return true;
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while i as isize <= j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i as isize > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != NONE {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return true;
            }
            if i as isize == j {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return true;
            }
            if !self.define(f, w[i]) {
                return false;
            }
        }
    }
}

/// HLT coset enumeration over the trivial subgroup. Returns the index and the
/// number of rows used, or `None` when `limit` rows do not suffice.
pub fn enumerate_cosets(p: &GroupPresentation, limit: usize) -> (Option<usize>, usize) {
    let width = 2 * p.generators;
    if width == 0 {
        return (Some(1), 1);
    }
    let rels: Vec<Vec<usize>> = p.relators.iter().map(|w| w.iter().map(|&l| CosetTable::col(l)).collect()).collect();
    let mut t = CosetTable {
        width,
        table: vec![NONE; width],
        parent: vec![0],
        limit: limit.max(1),
        queue: Vec::new(),
    };
    let mut c = 0u32;
    while (c as usize) < t.rows() {
        if t.live(c) {
            for r in &rels {
                if !t.scan_and_fill(c, r) {
                    return (None, t.rows());
                }
                if !t.live(c) {
                    break;
                }
            }
            if t.live(c) {
                for x in 0..width {
                    if t.get(c, x) == NONE && !t.define(c, x) {
                        return (None, t.rows());
                    }
                }
            }
        }
        c += 1;
    }
    let index = (0..t.rows() as u32).filter(|&c| t.live(c)).count();
    (Some(index), t.rows())
}

/// Decide triviality within `effort` coset-table rows.
pub fn is_trivial_group(p: &GroupPresentation, effort: usize) -> Result<TrivialityReport> {
    let simplified = simplify(p);
    let (abelian_rank, torsion) = simplified.abelianization()?;
    let abelian_torsion: Vec<String> = torsion.iter().map(ToString::to_string).collect();
    if abelian_rank > 0 || !torsion.is_empty() {
        return Ok(TrivialityReport {
            verdict: GroupVerdict::Nontrivial,
            abelian_rank,
            abelian_torsion,
            simplified,
            index: None,
            table_rows: 0,
        });
    }
    let (index, rows) = enumerate_cosets(&simplified, effort);
    let verdict = match index {
        Some(1) => GroupVerdict::Trivial,
        Some(_) => GroupVerdict::Nontrivial,
        None => GroupVerdict::Unknown,
    };
    Ok(TrivialityReport {
        verdict,
        abelian_rank,
        abelian_torsion,
        simplified,
        index,
        table_rows: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(generators: usize, relators: &[&[i32]]) -> GroupPresentation {
        GroupPresentation {
            generators,
            relators: relators.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn empty_presentation_is_trivial() {
        let r = is_trivial_group(&pres(0, &[]), DEFAULT_EFFORT).unwrap();
        assert_eq!(r.verdict, GroupVerdict::Trivial);
    }

    #[test]
    fn free_group_is_nontrivial() {
        let r = is_trivial_group(&pres(1, &[]), DEFAULT_EFFORT).unwrap();
        assert_eq!(r.verdict, GroupVerdict::Nontrivial);
        assert_eq!(r.abelian_rank, 1);
    }

    #[test]
    fn finite_groups_have_their_order_as_index() {
        // S_3 = <a, b | a², b³, (ab)²>
        let s3 = pres(2, &[&[1, 1], &[2, 2, 2], &[1, 2, 1, 2]]);
        assert_eq!(enumerate_cosets(&s3, 1000).0, Some(6));
        // quaternion group <a, b | a⁴, a²b⁻², b⁻¹aba>
        let q8 = pres(2, &[&[1, 1, 1, 1], &[1, 1, -2, -2], &[-2, 1, 2, 1]]);
        assert_eq!(enumerate_cosets(&q8, 1000).0, Some(8));
    }

    #[test]
    fn perfect_group_needs_enumeration() {
        // binary icosahedral <a, b, c | a² = b³ = c⁵ = abc> has trivial abelianization and order 120;
        // adding a = 1 kills it
        let binary = pres(3, &[&[1, 1, -3, -2, -1], &[2, 2, 2, -3, -2, -1], &[3, 3, 3, 3, 3, -3, -2, -1]]);
        let r = is_trivial_group(&binary, DEFAULT_EFFORT).unwrap();
        assert_eq!(r.abelian_rank, 0);
        assert!(r.abelian_torsion.is_empty());
        assert_eq!(r.verdict, GroupVerdict::Nontrivial);
        assert_eq!(r.index, Some(120));
        let mut killed = binary.clone();
        killed.relators.push(vec![1]);
        assert_eq!(is_trivial_group(&killed, DEFAULT_EFFORT).unwrap().verdict, GroupVerdict::Trivial);
    }

    #[test]
    fn effort_exhaustion_is_unknown() {
        let binary = pres(3, &[&[1, 1, -3, -2, -1], &[2, 2, 2, -3, -2, -1], &[3, 3, 3, 3, 3, -3, -2, -1]]);
        assert_eq!(is_trivial_group(&binary, 10).unwrap().verdict, GroupVerdict::Unknown);
    }

    #[test]
    fn hollow_and_full_triangle() {
        let hollow = SimplicialComplex::from_facets(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        let p = fundamental_group(&hollow, 0).unwrap();
        assert_eq!(p.generators, 1);
        assert!(p.relators.is_empty());
        let full = SimplicialComplex::from_facets(3, &[vec![0, 1, 2]]);
        let p = fundamental_group(&full, 0).unwrap();
        assert_eq!(simplify(&p).generators, 0);
        assert_eq!(is_trivial_group(&p, 100).unwrap().verdict, GroupVerdict::Trivial);
    }

    #[test]
    fn disconnected_is_rejected() {
        let c = SimplicialComplex::from_facets(2, &[]);
        assert_eq!(fundamental_group(&c, 0), Err(Error::Disconnected));
    }

    #[test]
    fn projective_plane_has_order_two() {
        let rp2 = SimplicialComplex::from_facets(
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
        );
        let p = fundamental_group(&rp2, 0).unwrap();
        assert_eq!(p.generators, 15 - 6 + 1);
        assert!(p.validate());
        let r = is_trivial_group(&p, DEFAULT_EFFORT).unwrap();
        assert_eq!(r.verdict, GroupVerdict::Nontrivial);
        assert_eq!(r.abelian_torsion, vec!["2".to_string()]);
    }
}
