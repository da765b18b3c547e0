//! The five conditions on `(F, U)` and the classification of a prime.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::builders::{build, BuildOptions};
use crate::complex::ComplexKind;
use crate::error::Result;
use crate::field::{Fe, PrimeContext};
use crate::homology::{
    components, four_loop_check, fundamental_group, is_trivial_group, reduced_homology_with, GroupVerdict, HomologyOptions,
};
use crate::ring::RingId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    Index {
        index: usize,
        /// Set when U = F×, where the condition is beside the point.
        full_unit_image: bool,
    },
    StepGraph {
        vertices: usize,
        edges: usize,
        symmetric: bool,
        components: Vec<Vec<String>>,
    },
    Closure {
        reached: usize,
        unreached: Vec<String>,
    },
    TwoIsNonunit,
    UnitPair {
        u1: String,
        u2: String,
    },
    NoWitness,
    Connectivity {
        components: usize,
        first_betti: usize,
        pi1: GroupVerdict,
        generators_after_tietze: usize,
        relators_after_tietze: usize,
        triangles_filled: bool,
        loops_checked: usize,
        loops_without_cone: usize,
    },
    Sums {
        failing: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub verdict: Verdict,
    pub witness: Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    FullUnitImage,
    #[serde(rename = "conditions-1-to-5")]
    ConditionsOneToFive,
    Neither,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::FullUnitImage => "full-unit-image",
            Classification::ConditionsOneToFive => "conditions-1-to-5",
            Classification::Neither => "neither",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub ring: RingId,
    pub p: String,
    pub q: usize,
    pub units: usize,
    pub index: usize,
    pub condition_1: ConditionCheck,
    pub condition_2: ConditionCheck,
    pub condition_3: ConditionCheck,
    pub condition_4: ConditionCheck,
    pub condition_5: ConditionCheck,
    pub sum_of_two_units: ConditionCheck,
    pub classification: Classification,
}

impl ConditionReport {
    pub fn conditions(&self) -> [&ConditionCheck; 5] {
        [&self.condition_1, &self.condition_2, &self.condition_3, &self.condition_4, &self.condition_5]
    }

    pub fn all_pass(&self) -> bool {
        self.conditions().iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn any_unknown(&self) -> bool {
        self.conditions().iter().any(|c| c.verdict == Verdict::Unknown)
    }
}

fn nonunits(ctx: &PrimeContext) -> Vec<Fe> {
    ctx.nonzero().filter(|&x| ctx.is_nonunit_class(x)).collect()
}

/// `|F×/U| = 2`.
pub fn check_condition_1(ctx: &PrimeContext) -> ConditionCheck {
    let index = ctx.coset_count();
    ConditionCheck {
        verdict: Verdict::from_bool(index == 2),
        witness: Witness::Index {
            index,
            full_unit_image: ctx.is_full_unit_image(),
        },
    }
}

/// Steps `λ → λ + u` between elements of `F×∖U`.
pub fn step_graph(ctx: &PrimeContext) -> (Vec<Fe>, Vec<Vec<usize>>) {
    let verts = nonunits(ctx);
    let mut pos = vec![usize::MAX; ctx.q()];
    for (i, v) in verts.iter().enumerate() {
        pos[v.idx()] = i;
    }
    let adj = verts
        .iter()
        .map(|&l| {
            let mut out: Vec<usize> = ctx
                .unit_image()
                .iter()
                .map(|&u| ctx.add(l, u))
                .filter(|&m| ctx.is_nonunit_class(m))
                .map(|m| pos[m.idx()])
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    (verts, adj)
}

fn reachable(adj: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Every ordered pair of elements of `F×∖U` is joined by a chain of unit steps.
pub fn check_condition_2(ctx: &PrimeContext) -> ConditionCheck {
    let (verts, adj) = step_graph(ctx);
    let symmetric = adj.iter().enumerate().all(|(v, out)| out.iter().all(|&w| adj[w].binary_search(&v).is_ok()));
    let strongly_connected = (0..verts.len()).all(|v| reachable(&adj, v).iter().all(|&s| s));
    // reachability classes for the witness
    let mut comp = vec![usize::MAX; verts.len()];
    let mut groups: Vec<Vec<String>> = Vec::new();
    for v in 0..verts.len() {
        if comp[v] != usize::MAX {
            continue;
        }
        let seen = reachable(&adj, v);
        let members: Vec<usize> = (0..verts.len()).filter(|&w| seen[w] && comp[w] == usize::MAX).collect();
        for &w in &members {
            comp[w] = groups.len();
        }
        groups.push(members.iter().map(|&w| ctx.show(verts[w])).collect());
    }
    ConditionCheck {
        verdict: Verdict::from_bool(strongly_connected),
        witness: Witness::StepGraph {
            vertices: verts.len(),
            edges: adj.iter().map(Vec::len).sum(),
            symmetric,
            components: groups,
        },
    }
}

/// Elements reachable from 0 by adding generators.
pub fn additive_closure(ctx: &PrimeContext, generators: &[Fe]) -> Vec<bool> {
    let mut seen = vec![false; ctx.q()];
    seen[0] = true;
    let mut queue = VecDeque::from([Fe::ZERO]);
    while let Some(x) = queue.pop_front() {
        for &g in generators {
            let y = ctx.add(x, g);
            if !seen[y.idx()] {
                seen[y.idx()] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn closure_check(ctx: &PrimeContext, generators: &[Fe]) -> ConditionCheck {
    let seen = additive_closure(ctx, generators);
    let unreached: Vec<String> = ctx.elements().filter(|x| !seen[x.idx()]).map(|x| ctx.show(x)).collect();
    ConditionCheck {
        verdict: Verdict::from_bool(unreached.is_empty()),
        witness: Witness::Closure {
            reached: seen.iter().filter(|&&s| s).count(),
            unreached,
        },
    }
}

/// F is additively generated by U.
pub fn check_condition_3(ctx: &PrimeContext) -> ConditionCheck {
    closure_check(ctx, ctx.unit_image())
}

/// Does `(u1, u2)` satisfy the unit-pair branch of condition 4?
pub fn condition_4_pair_holds(ctx: &PrimeContext, u1: Fe, u2: Fe) -> bool {
    let s = ctx.add(u1, u2);
    let t = ctx.add(s, u1);
    let w = ctx.add(t, u1);
    ctx.is_unit_image(u1)
        && ctx.is_unit_image(u2)
        && ctx.is_nonunit_class(s)
        && ctx.is_nonunit_class(t)
        && ctx.is_unit_image(w)
}

/// `2 ∈ F×∖U`, or some `u_1, u_2 ∈ U` have `u_1 + u_2, 2u_1 + u_2 ∈ F×∖U` and `3u_1 + u_2 ∈ U`.
pub fn check_condition_4(ctx: &PrimeContext) -> ConditionCheck {
    if ctx.is_nonunit_class(ctx.from_int(2)) {
        return ConditionCheck {
            verdict: Verdict::Pass,
            witness: Witness::TwoIsNonunit,
        };
    }
    for &u1 in ctx.unit_image() {
        for &u2 in ctx.unit_image() {
            if condition_4_pair_holds(ctx, u1, u2) {
                return ConditionCheck {
                    verdict: Verdict::Pass,
                    witness: Witness::UnitPair {
                        u1: ctx.show(u1),
                        u2: ctx.show(u2),
                    },
                };
            }
        }
    }
    ConditionCheck {
        verdict: Verdict::Fail,
        witness: Witness::NoWitness,
    }
}

/// `BDA_2` over F is connected, has `H_1 = 0`, and its edge-path group is trivial.
pub fn check_condition_5(ctx: &PrimeContext, effort: usize) -> Result<ConditionCheck> {
    let complex = build(ctx, ComplexKind::BDA, 2, 0, &BuildOptions::default())?;
    let (count, _) = components(&complex);
    let loops = four_loop_check(&complex, ctx)?;
    let mut witness = Witness::Connectivity {
        components: count,
        first_betti: 0,
        pi1: GroupVerdict::Unknown,
        generators_after_tietze: 0,
        relators_after_tietze: 0,
        triangles_filled: loops.triangles_filled,
        loops_checked: loops.loops_checked,
        loops_without_cone: loops.cone_failures.len(),
    };
    if count != 1 {
        return Ok(ConditionCheck {
            verdict: Verdict::Fail,
            witness,
        });
    }
    let h = reduced_homology_with(
        &complex,
        &HomologyOptions {
            max_degree: Some(1),
            ..HomologyOptions::default()
        },
    )?;
    let b1 = h.betti(1);
    let pi1 = is_trivial_group(&fundamental_group(&complex, 0)?, effort)?;
    if let Witness::Connectivity {
        first_betti,
        pi1: v,
        generators_after_tietze,
        relators_after_tietze,
        ..
    } = &mut witness
    {
        *first_betti = b1;
        *v = pi1.verdict;
        *generators_after_tietze = pi1.simplified.generators;
        *relators_after_tietze = pi1.simplified.relators.len();
    }
    let verdict = match (b1, pi1.verdict) {
        (0, GroupVerdict::Trivial) => Verdict::Pass,
        (0, GroupVerdict::Unknown) => Verdict::Unknown,
        _ => Verdict::Fail,
    };
    Ok(ConditionCheck { verdict, witness })
}

/// Every element of `F×∖U` is a sum of two elements of U.
pub fn check_sum_of_two_units(ctx: &PrimeContext) -> ConditionCheck {
    let units = ctx.unit_image();
    let failing: Vec<String> = nonunits(ctx)
        .into_iter()
        .filter(|&c| !units.iter().any(|&u1| units.iter().any(|&u2| ctx.add(u1, u2) == c)))
        .map(|c| ctx.show(c))
        .collect();
    ConditionCheck {
        verdict: Verdict::from_bool(failing.is_empty()),
        witness: Witness::Sums { failing },
    }
}

pub fn classify_pair(ctx: &PrimeContext, effort: usize) -> Result<ConditionReport> {
    let condition_1 = check_condition_1(ctx);
    let condition_2 = check_condition_2(ctx);
    let condition_3 = check_condition_3(ctx);
    let condition_4 = check_condition_4(ctx);
    let condition_5 = check_condition_5(ctx, effort)?;
    let sum_of_two_units = check_sum_of_two_units(ctx);
    let mut report = ConditionReport {
        ring: ctx.ring(),
        p: ctx.p().to_string(),
        q: ctx.q(),
        units: ctx.unit_image().len(),
        index: ctx.coset_count(),
        condition_1,
        condition_2,
        condition_3,
        condition_4,
        condition_5,
        sum_of_two_units,
        classification: Classification::Neither,
    };
    report.classification = if ctx.is_full_unit_image() {
        Classification::FullUnitImage
    } else if report.all_pass() {
        Classification::ConditionsOneToFive
    } else {
        Classification::Neither
    };
    Ok(report)
}

/// Classify every prime of `ring` with norm at most `norm_max`, skipping
/// fields above `field_cap` elements.
pub fn scan(ring: RingId, norm_max: i64, effort: usize, field_cap: u64) -> Vec<Result<ConditionReport>> {
    use rayon::prelude::*;
    ring.primes_up_to_norm(norm_max)
        .into_par_iter()
        .map(|p| {
            let ctx = PrimeContext::with_cap(ring, p, field_cap)?;
            classify_pair(&ctx, effort)
        })
        .collect()
}
