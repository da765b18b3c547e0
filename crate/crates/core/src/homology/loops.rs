//! Filled triangles and cone vertices for 4-loops in `BDA_2`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::builders::{canonicalize, vertex_vector};
use crate::complex::{ComplexKind, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeContext};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCase {
    pub c1: String,
    pub c2: String,
    /// Cone vertices adjacent to all four loop vertices, as coordinate strings.
    pub cones: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourLoopReport {
    /// Every `c ∈ F×∖U` is a sum of two elements of U.
    pub sums_of_units: bool,
    /// Every `c ∈ F×∖U` has some `u ∈ U` with `c + u ∈ F×∖U`.
    pub unit_shifts: bool,
    /// `{u ∈ U : u − 1 ∈ U}`.
    pub units_with_unit_predecessor: Vec<String>,
    pub hypotheses_ok: bool,
    pub triangles_filled: bool,
    pub unfilled_triangles: usize,
    pub loops_checked: usize,
    pub cone_failures: Vec<LoopCase>,
    pub cases: Vec<LoopCase>,
}

impl FourLoopReport {
    pub fn all_coned(&self) -> bool {
        self.cone_failures.is_empty()
    }
}

struct VertexIndex<'a> {
    ctx: &'a PrimeContext,
    index: HashMap<Vec<Fe>, u32>,
}

impl VertexIndex<'_> {
    fn find(&self, mut v: Vec<Fe>) -> Option<u32> {
        canonicalize(self.ctx, &mut v).then_some(())?;
        self.index.get(&v).copied()
    }
}

fn adjacent(adj: &[Vec<u32>], a: u32, b: u32) -> bool {
    adj[a as usize].binary_search(&b).is_ok()
}

/// Check the hypotheses, the filled-triangle property and every 4-loop
/// representative of `BDA_2` over `ctx`.
///
/// After moving one edge of the loop to `[e_1], [e_2]`, the loop is
/// `[e_1] − [c_1e_1 + e_2] − [e_1 + c_2e_2] − [e_2]` with `c_1c_2 − 1 ∈ U`.
/// If `c_1` or `c_2` lies in U the loop has a diagonal and splits into two
/// filled triangles, so only `c_1, c_2 ∈ F×∖U` remain.
pub fn four_loop_check(complex: &SimplicialComplex, ctx: &PrimeContext) -> Result<FourLoopReport> {
    let h = complex.header();
    if h.kind != ComplexKind::BDA || h.n != 2 || h.m != 0 || h.ring != Some(ctx.ring()) || h.q != ctx.q() {
        return Err(Error::WrongComplexType {
            expected: format!("BDA_2 over {} mod {}", ctx.ring().name(), ctx.p()),
            found: format!("{} (n {}, m {}, q {})", h.kind, h.n, h.m, h.q),
        });
    }
    let nonunits: Vec<Fe> = ctx.nonzero().filter(|&x| ctx.is_nonunit_class(x)).collect();
    let units = ctx.unit_image().to_vec();

    let sums_of_units = nonunits
        .iter()
        .all(|&c| units.iter().any(|&u1| units.iter().any(|&u2| ctx.add(u1, u2) == c)));
    let unit_shifts = nonunits
        .iter()
        .all(|&c| units.iter().any(|&u| ctx.is_nonunit_class(ctx.add(c, u))));
    let units_with_unit_predecessor = units
        .iter()
        .filter(|&&u| ctx.is_unit_image(ctx.sub(u, Fe::ONE)))
        .map(|&u| ctx.show(u))
        .collect();

    let adj = complex.adjacency();
    let mut unfilled = 0;
    for e in complex.simplices(1) {
        let (a, b) = (e[0], e[1]);
        for &c in adj[b as usize].iter().filter(|&&c| c > b) {
            if adjacent(&adj, a, c) && !complex.contains(&[a, b, c]) {
                unfilled += 1;
            }
        }
    }

    let index = VertexIndex {
        ctx,
        index: (0..complex.vertex_count()).map(|v| (vertex_vector(complex, v), v as u32)).collect(),
    };
    let (e1, e2) = (vec![Fe::ONE, Fe::ZERO], vec![Fe::ZERO, Fe::ONE]);
    let mut cases = Vec::new();
    let mut failures = Vec::new();
    let mut loops_checked = 0;
    for &c1 in &nonunits {
        for &c2 in &nonunits {
            if !ctx.is_unit_image(ctx.sub(ctx.mul(c1, c2), Fe::ONE)) {
                continue;
            }
            loops_checked += 1;
            let ring = [e1.clone(), vec![c1, Fe::ONE], vec![Fe::ONE, c2], e2.clone()];
            let ids: Vec<u32> = ring
                .iter()
                .map(|v| index.find(v.clone()).ok_or_else(|| Error::InvalidParameter("loop vertex missing".into())))
                .collect::<Result<_>>()?;
            let cones: Vec<String> = (0..complex.vertex_count() as u32)
                .filter(|&w| ids.iter().all(|&v| adjacent(&adj, w, v)))
                .map(|w| show_vector(ctx, &vertex_vector(complex, w as usize)))
                .collect();
            let case = LoopCase {
                c1: ctx.show(c1),
                c2: ctx.show(c2),
                cones,
            };
            if case.cones.is_empty() {
                failures.push(case.clone());
            }
            cases.push(case);
        }
    }
    Ok(FourLoopReport {
        sums_of_units,
        unit_shifts,
        units_with_unit_predecessor,
        hypotheses_ok: sums_of_units && unit_shifts,
        triangles_filled: unfilled == 0,
        unfilled_triangles: unfilled,
        loops_checked,
        cone_failures: failures,
        cases,
    })
}

/// `(x, y)` with coordinates shown as canonical representatives.
pub fn show_vector(ctx: &PrimeContext, v: &[Fe]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| ctx.show(x)).collect();
    format!("({})", parts.join(", "))
}

/// Canonical display of the U-vector class of `v`.
pub fn show_class(ctx: &PrimeContext, v: &[Fe]) -> String {
    let mut v = v.to_vec();
    canonicalize(ctx, &mut v);
    show_vector(ctx, &v)
}
