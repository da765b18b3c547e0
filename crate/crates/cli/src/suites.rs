//! Verification suites. Each suite expands its configuration into items, runs
//! them on a worker pool and collects one deterministic report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use buildings_core::conditions::classify_pair;
use buildings_core::field::contexts_up_to;
use buildings_core::homology::{four_loop_check, fundamental_group, is_trivial_group, GroupVerdict, DEFAULT_EFFORT};
use buildings_core::ranks::{lower_bound, recursive_ranks, RankVariant, DEFAULT_VARIANT};
use buildings_core::{Classification, ComplexKind, Error as CoreError, PrimeContext, RingId};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::apartments::apartment_check;
use crate::cache::{Cache, ComplexRequest, ComplexSummary};
use crate::lifting::lift_samples;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    SolomonTits,
    Connectivity,
    Conditions,
    Ranks,
    Lifting,
    Apartments,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::SolomonTits,
        SuiteName::Connectivity,
        SuiteName::Conditions,
        SuiteName::Ranks,
        SuiteName::Lifting,
        SuiteName::Apartments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::SolomonTits => "solomon-tits",
            SuiteName::Connectivity => "connectivity",
            SuiteName::Conditions => "conditions",
            SuiteName::Ranks => "ranks",
            SuiteName::Lifting => "lifting",
            SuiteName::Apartments => "apartments",
        }
    }
}

impl FromStr for SuiteName {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| anyhow!("unknown suite `{s}`; expected one of solomon-tits, connectivity, conditions, ranks, lifting, apartments"))
    }
}

/// A prime given by ring and element, as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub ring: String,
    pub p: String,
}

impl ContextSpec {
    pub fn resolve(&self, field_cap: u64) -> Result<PrimeContext> {
        let ring = RingId::from_str(&self.ring)?;
        let p = buildings_core::RingElement::parse(ring, &self.p)?;
        Ok(PrimeContext::with_cap(ring, p, field_cap)?)
    }
}

impl FromStr for ContextSpec {
    type Err = anyhow::Error;

    /// `ring:p`, e.g. `zi:3` or `eisenstein:1+4w`.
    fn from_str(s: &str) -> Result<Self> {
        let (ring, p) = s.split_once(':').ok_or_else(|| anyhow!("expected `ring:p`, got `{s}`"))?;
        Ok(ContextSpec {
            ring: ring.trim().to_string(),
            p: p.trim().to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// Explicit primes; when absent each suite uses its own default list.
    pub contexts: Option<Vec<ContextSpec>>,
    pub q_max: Option<usize>,
    pub n_max: Option<usize>,
    /// Simplex cap per built complex.
    pub cap: u64,
    /// Coset-table budget for edge-path group checks.
    pub effort: usize,
    /// Treat Unknown verdicts as failures.
    pub strict: bool,
    /// Worker threads; 0 means one per logical core.
    pub jobs: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            contexts: None,
            q_max: None,
            n_max: None,
            cap: buildings_core::builders::DEFAULT_SIMPLEX_CAP,
            effort: DEFAULT_EFFORT,
            strict: false,
            jobs: 0,
            samples: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ItemStatus {
    Pass,
    Fail,
    Unknown,
    /// Skipped because a build would exceed the simplex cap.
    Capped,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteItem {
    pub id: String,
    pub status: ItemStatus,
    pub message: String,
    /// `∂∂ = 0` and Euler consistency of every complex the item built.
    pub complexes: Vec<ComplexCheck>,
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexCheck {
    pub label: String,
    pub counts: Vec<usize>,
    pub boundary_squared_zero: bool,
    pub euler_consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub version: String,
    pub strict: bool,
    pub items: Vec<SuiteItem>,
    pub counts: BTreeMap<String, usize>,
    pub passed: bool,
}

impl SuiteReport {
    /// Every complex built by the suite passed both infrastructure checks.
    pub fn infrastructure_ok(&self) -> bool {
        self.items
            .iter()
            .flat_map(|i| &i.complexes)
            .all(|c| c.boundary_squared_zero && c.euler_consistent)
    }

    pub fn item(&self, id: &str) -> Option<&SuiteItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite {}: {}", self.suite.name(), if self.passed { "PASS" } else { "FAIL" });
        for i in &self.items {
            let _ = writeln!(s, "  [{}] {}: {}", status_name(i.status), i.id, i.message);
        }
        let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
        let _ = writeln!(s, "  {} items ({})", self.items.len(), counts.join(", "));
        s
    }
}

fn status_name(s: ItemStatus) -> &'static str {
    match s {
        ItemStatus::Pass => "pass",
        ItemStatus::Fail => "FAIL",
        ItemStatus::Unknown => "unknown",
        ItemStatus::Capped => "capped",
        ItemStatus::Error => "ERROR",
    }
}

/// Wall time per item, kept out of the report so reports stay byte-stable.
pub type Timings = BTreeMap<String, f64>;

type Job<'a> = Box<dyn Fn(&Cache) -> Result<ItemOutcome> + Send + Sync + 'a>;

struct ItemOutcome {
    status: ItemStatus,
    message: String,
    complexes: Vec<ComplexCheck>,
    data: Value,
}

impl ItemOutcome {
    fn new(ok: bool, message: impl Into<String>) -> Self {
        ItemOutcome {
            status: if ok { ItemStatus::Pass } else { ItemStatus::Fail },
            message: message.into(),
            complexes: Vec::new(),
            data: Value::Null,
        }
    }

    fn data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    fn complexes(mut self, c: Vec<ComplexCheck>) -> Self {
        self.complexes = c;
        self
    }
}

fn check_of(label: String, s: &ComplexSummary) -> ComplexCheck {
    ComplexCheck {
        label,
        counts: s.homology.counts.clone(),
        boundary_squared_zero: s.boundary_squared_zero,
        euler_consistent: s.euler_consistent,
    }
}

fn ctx_name(ctx: &PrimeContext) -> String {
    format!("{}:{}", ctx.ring().name(), ctx.p())
}

fn contexts(config: &SuiteConfig, default_q_max: usize) -> Result<Vec<PrimeContext>> {
    match &config.contexts {
        Some(specs) => specs.iter().map(|s| s.resolve(1 << 16)).collect(),
        None => Ok(contexts_up_to(config.q_max.unwrap_or(default_q_max))),
    }
}

/// Run the named suite with `config`, using `cache` for complexes.
pub fn run_suite(name: SuiteName, config: &SuiteConfig, cache: &Cache) -> Result<(SuiteReport, Timings)> {
    let jobs = match name {
        SuiteName::SolomonTits => solomon_tits_jobs(config)?,
        SuiteName::Connectivity => connectivity_jobs(config)?,
        SuiteName::Conditions => conditions_jobs(config)?,
        SuiteName::Ranks => ranks_jobs(config)?,
        SuiteName::Lifting => lifting_jobs(config)?,
        SuiteName::Apartments => apartment_jobs(config)?,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    let results: Vec<(SuiteItem, f64)> = pool.install(|| {
        jobs.par_iter()
            .map(|(id, job)| {
                let start = Instant::now();
                let item = match job(cache) {
                    Ok(o) => SuiteItem {
                        id: id.clone(),
                        status: o.status,
                        message: o.message,
                        complexes: o.complexes,
                        data: o.data,
                    },
                    Err(e) => {
                        let capped = matches!(e.downcast_ref::<CoreError>(), Some(CoreError::ResourceCap { .. }));
                        SuiteItem {
                            id: id.clone(),
                            status: if capped { ItemStatus::Capped } else { ItemStatus::Error },
                            message: e.to_string(),
                            complexes: Vec::new(),
                            data: Value::Null,
                        }
                    }
                };
                (item, start.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut timings = Timings::new();
    let mut items = Vec::with_capacity(results.len());
    for (item, t) in results {
        timings.insert(item.id.clone(), t);
        items.push(item);
    }
    let mut counts = BTreeMap::new();
    for i in &items {
        *counts.entry(status_name(i.status).to_ascii_lowercase()).or_insert(0) += 1;
    }
    let passed = suite_passes(&items, config.strict);
    Ok((
        SuiteReport {
            suite: name,
            version: crate::manifest::TOOL_VERSION.to_string(),
            strict: config.strict,
            items,
            counts,
            passed,
        },
        timings,
    ))
}

/// Capped items do not fail a suite; Unknown ones fail only under `strict`.
pub fn suite_passes(items: &[SuiteItem], strict: bool) -> bool {
    items.iter().all(|i| match i.status {
        ItemStatus::Pass | ItemStatus::Capped => true,
        ItemStatus::Unknown => !strict,
        ItemStatus::Fail | ItemStatus::Error => false,
    }) && items.iter().flat_map(|i| &i.complexes).all(|c| c.boundary_squared_zero && c.euler_consistent)
}

fn n_range(config: &SuiteConfig, lo: usize, default_max: usize) -> std::ops::RangeInclusive<usize> {
    lo..=config.n_max.unwrap_or(default_max)
}

fn solomon_tits_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for ctx in contexts(config, 9)? {
        for n in n_range(config, 2, 3) {
            for oriented in [false, true] {
                let kind = if oriented { ComplexKind::OrientedTits } else { ComplexKind::Tits };
                let id = format!("{} {} n={n}", ctx_name(&ctx), kind);
                let ctx = ctx.clone();
                let cap = config.cap;
                jobs.push((
                    id,
                    Box::new(move |cache: &Cache| {
                        let req = ComplexRequest::new(kind, n, 0).cap(cap);
                        let s = cache.summary(&ctx, &req)?;
                        let h = &s.homology;
                        let wedge = h.concentrated_in(n - 2);
                        let top = h.betti(n - 2);
                        let mut ok = wedge;
                        let mut message = format!("betti {:?}", h.betti);
                        let mut expected = None;
                        if ctx.is_full_unit_image() || !oriented {
                            let e = BigInt::from(ctx.q()).pow((n * (n - 1) / 2) as u32);
                            ok &= BigInt::from(top) == e;
                            message.push_str(&format!(", top rank {top} (expected q^C(n,2) = {e})"));
                            expected = Some(e.to_string());
                        }
                        Ok(ItemOutcome::new(ok, message)
                            .data(json!({ "betti": h.betti, "wedge_profile": wedge, "expected_top_rank": expected }))
                            .complexes(vec![check_of(req.label(&ctx), &s)]))
                    }),
                ));
            }
        }
    }
    Ok(jobs)
}

fn connectivity_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for ctx in contexts(config, 5)? {
        for n in n_range(config, 2, 3) {
            for m in [0usize, 1] {
                for kind in [ComplexKind::B, ComplexKind::BD, ComplexKind::BDA] {
                    let id = format!("{} {kind}_{n},{m}", ctx_name(&ctx));
                    let (ctx, cap) = (ctx.clone(), config.cap);
                    jobs.push((
                        id,
                        Box::new(move |cache: &Cache| {
                            // the (n−1)-skeleton determines H̃_i for i ≤ n − 2
                            let req = ComplexRequest::new(kind, n, m).max_dim(Some(n - 1)).cap(cap);
                            let s = cache.summary(&ctx, &req)?;
                            let ok = s.homology.vanishes_through(n - 2);
                            let msg = format!("H̃_i = 0 for i ≤ {}: {ok}; betti {:?}", n - 2, &s.homology.betti[..n - 1]);
                            Ok(ItemOutcome::new(ok, msg)
                                .data(json!({ "betti_through_n_minus_2": &s.homology.betti[..n - 1] }))
                                .complexes(vec![check_of(req.label(&ctx), &s)]))
                        }),
                    ));
                }
            }
            let id = format!("{} BDA_{n} top", ctx_name(&ctx));
            let (ctx, cap, effort) = (ctx.clone(), config.cap, config.effort);
            jobs.push((
                id,
                Box::new(move |cache: &Cache| {
                    let report = classify_pair(&ctx, effort)?;
                    if report.classification == Classification::Neither {
                        return Ok(ItemOutcome::new(true, format!("not applicable ({})", report.classification))
                            .data(json!({ "classification": report.classification, "applicable": false })));
                    }
                    let req = ComplexRequest::new(ComplexKind::BDA, n, 0).cap(cap);
                    let s = cache.summary(&ctx, &req)?;
                    let b = s.homology.betti(n - 1);
                    Ok(ItemOutcome::new(b == 0, format!("{}: H̃_{} = {b}", report.classification, n - 1))
                        .data(json!({ "classification": report.classification, "applicable": true, "betti": s.homology.betti }))
                        .complexes(vec![check_of(req.label(&ctx), &s)]))
                }),
            ));
        }
    }
    Ok(jobs)
}

/// The classification table: pairs claimed to have full unit image, then
/// pairs claimed to satisfy conditions (1)–(5).
pub const CLASSIFIED_PAIRS: [(&str, &str, Classification); 8] = [
    ("zs", "1+s", Classification::FullUnitImage),
    ("zi", "1+2i", Classification::FullUnitImage),
    ("zw", "1+2w", Classification::FullUnitImage),
    ("zw", "1+3w", Classification::FullUnitImage),
    ("zw", "2+3w", Classification::FullUnitImage),
    ("zi", "3", Classification::ConditionsOneToFive),
    ("zw", "1+4w", Classification::ConditionsOneToFive),
    ("zw", "3+4w", Classification::ConditionsOneToFive),
];

/// Rational primes with U = {±1}: conditions hold exactly for p ≤ 5.
pub const INTEGER_BOUNDARY: [(i64, bool); 5] = [(3, true), (5, true), (7, false), (11, false), (13, false)];

fn conditions_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    let effort = config.effort;
    if let Some(specs) = &config.contexts {
        for spec in specs {
            let ctx = spec.resolve(1 << 16)?;
            jobs.push((
                format!("classify {}", ctx_name(&ctx)),
                Box::new(move |_: &Cache| {
                    let r = classify_pair(&ctx, effort)?;
                    let mut o = ItemOutcome::new(true, r.classification.to_string());
                    if r.any_unknown() {
                        o.status = ItemStatus::Unknown;
                    }
                    Ok(o.data(serde_json::to_value(&r)?))
                }),
            ));
        }
        return Ok(jobs);
    }
    for (ring, p, expected) in CLASSIFIED_PAIRS {
        let ctx = ContextSpec {
            ring: ring.into(),
            p: p.into(),
        }
        .resolve(1 << 16)?;
        jobs.push((
            format!("classify {}", ctx_name(&ctx)),
            Box::new(move |_: &Cache| {
                let r = classify_pair(&ctx, effort)?;
                let mut ok = r.classification == expected;
                if expected == Classification::ConditionsOneToFive {
                    ok &= witness_pi1(&r.condition_5.witness) == Some(GroupVerdict::Trivial);
                }
                let mut o = ItemOutcome::new(ok, format!("{} (expected {expected})", r.classification));
                if !ok && r.any_unknown() {
                    o.status = ItemStatus::Unknown;
                }
                Ok(o.data(serde_json::to_value(&r)?))
            }),
        ));
        if expected == Classification::ConditionsOneToFive {
            let ctx = ContextSpec {
                ring: ring.into(),
                p: p.into(),
            }
            .resolve(1 << 16)?;
            let cap = config.cap;
            jobs.push((
                format!("four-loops {}", ctx_name(&ctx)),
                Box::new(move |cache: &Cache| four_loop_item(&ctx, cache, cap, effort)),
            ));
        }
    }
    for (p, holds) in INTEGER_BOUNDARY {
        let ctx = PrimeContext::new(RingId::Integers, buildings_core::RingElement::from_i64(RingId::Integers, p, 0))?;
        jobs.push((
            format!("boundary {}", ctx_name(&ctx)),
            Box::new(move |_: &Cache| {
                let r = classify_pair(&ctx, effort)?;
                let verdicts: Vec<String> = r.conditions().iter().map(|c| c.verdict.to_string()).collect();
                let ok = r.all_pass() == holds;
                let msg = format!("conditions {verdicts:?}, index {} (expected all pass: {holds})", r.index);
                Ok(ItemOutcome::new(ok, msg).data(serde_json::to_value(&r)?))
            }),
        ));
    }
    Ok(jobs)
}

fn witness_pi1(w: &buildings_core::conditions::Witness) -> Option<GroupVerdict> {
    match w {
        buildings_core::conditions::Witness::Connectivity { pi1, .. } => Some(*pi1),
        _ => None,
    }
}

fn four_loop_item(ctx: &PrimeContext, cache: &Cache, cap: u64, effort: usize) -> Result<ItemOutcome> {
    let req = ComplexRequest::new(ComplexKind::BDA, 2, 0).cap(cap);
    let c = cache.complex(ctx, &req)?;
    let s = cache.summary_of(&c)?;
    let r = four_loop_check(&c, ctx)?;
    // loops without a cone are discharged when the edge-path group is trivial
    let pi1 = if r.all_coned() {
        None
    } else {
        Some(is_trivial_group(&fundamental_group(&c, 0)?, effort)?.verdict)
    };
    let discharged = r.all_coned() || pi1 == Some(GroupVerdict::Trivial);
    let ok = r.hypotheses_ok && r.triangles_filled && discharged;
    let msg = format!(
        "{} loops, {} without a cone, unfilled triangles {}",
        r.loops_checked,
        r.cone_failures.len(),
        r.unfilled_triangles
    );
    let mut o = ItemOutcome::new(ok, msg)
        .data(json!({ "four_loops": r, "pi1": pi1 }))
        .complexes(vec![check_of(req.label(ctx), &s)]);
    if !ok && pi1 == Some(GroupVerdict::Unknown) {
        o.status = ItemStatus::Unknown;
    }
    Ok(o)
}

fn ranks_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    let cap = config.cap;
    let mut push = |ctx: PrimeContext, n: usize| {
        jobs.push((
            format!("{} t_{n}", ctx_name(&ctx)),
            Box::new(move |cache: &Cache| rank_item(&ctx, n, cache, cap)) as Job,
        ));
    };
    for ctx in contexts(config, 13)? {
        push(ctx, 2);
    }
    if config.contexts.is_none() {
        for spec in ["z:3", "z:5", "zi:3"] {
            push(ContextSpec::from_str(spec)?.resolve(1 << 16)?, 3);
        }
    } else if let Some(n_max) = config.n_max {
        for ctx in contexts(config, 13)? {
            for n in 3..=n_max {
                push(ctx.clone(), n);
            }
        }
    }
    Ok(jobs)
}

fn rank_item(ctx: &PrimeContext, n: usize, cache: &Cache, cap: u64) -> Result<ItemOutcome> {
    let req = ComplexRequest::new(ComplexKind::OrientedTits, n, 0).cap(cap);
    let s = cache.summary(ctx, &req)?;
    let wedge = s.homology.concentrated_in(n - 2);
    let oracle = BigInt::from(s.homology.betti(n - 2));
    let (q, c) = (ctx.q() as u64, ctx.coset_count() as u64);
    let formula = |v: RankVariant| recursive_ranks(q, c, n, v).pop().expect("n ≥ 1");
    let (cosets, orbits) = (formula(RankVariant::Cosets), formula(RankVariant::Orbits));
    let bound = BigInt::from(lower_bound(ctx, n));
    let full = ctx.is_full_unit_image();
    let bound_ok = oracle >= bound && (!full || oracle == bound);
    let agreeing: Vec<&str> = RankVariant::ALL
        .into_iter()
        .filter(|&v| if v == RankVariant::Cosets { cosets == oracle } else { orbits == oracle })
        .map(RankVariant::name)
        .collect();
    let default_agrees = agreeing.contains(&DEFAULT_VARIANT.name());
    let mut ok = wedge && bound_ok && default_agrees;
    let mut closed_form = None;
    if n == 2 {
        let cf = BigInt::from(c * (q + 1) - 1);
        ok &= cosets == cf && orbits == cf && oracle == cf;
        closed_form = Some(cf.to_string());
    }
    let msg = format!(
        "oracle {oracle}, cosets {cosets}, orbits {orbits}, lower bound {bound}; agreeing {agreeing:?}"
    );
    Ok(ItemOutcome::new(ok, msg)
        .data(json!({
            "n": n,
            "oracle": oracle.to_string(),
            "cosets": cosets.to_string(),
            "orbits": orbits.to_string(),
            "closed_form": closed_form,
            "lower_bound": bound.to_string(),
            "lower_bound_holds": bound_ok,
            "equality_expected": full,
            "agreeing": agreeing,
            "default_variant": DEFAULT_VARIANT,
            "wedge_profile": wedge,
        }))
        .complexes(vec![check_of(req.label(ctx), &s)]))
}

fn lifting_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    for ctx in contexts(config, 13)? {
        for n in n_range(config, 2, 3) {
            let (ctx, samples, seed) = (ctx.clone(), config.samples, config.seed);
            jobs.push((
                format!("{} SL_{n}", ctx_name(&ctx)),
                Box::new(move |_: &Cache| {
                    let r = lift_samples(&ctx, n, samples, seed);
                    let msg = format!("{}/{} lifted, max entry norm {}", r.lifted, r.samples, r.max_entry_norm);
                    Ok(ItemOutcome::new(r.ok(), msg).data(serde_json::to_value(&r)?))
                }),
            ));
        }
    }
    Ok(jobs)
}

fn apartment_jobs(config: &SuiteConfig) -> Result<Vec<(String, Job<'static>)>> {
    let mut jobs: Vec<(String, Job)> = Vec::new();
    let targets: Vec<(PrimeContext, bool)> = match &config.contexts {
        Some(_) => contexts(config, 0)?.into_iter().flat_map(|c| [(c.clone(), false), (c, true)]).collect(),
        None => vec![
            (ContextSpec::from_str("z:3")?.resolve(1 << 16)?, false),
            (ContextSpec::from_str("zi:3")?.resolve(1 << 16)?, true),
        ],
    };
    let n = config.n_max.unwrap_or(3);
    if n < 2 {
        bail!("apartments need n ≥ 2");
    }
    for (ctx, oriented) in targets {
        let (samples, seed, cap) = (config.samples.max(1), config.seed, config.cap);
        let kind = if oriented { "TU" } else { "T" };
        jobs.push((
            format!("{} {kind}_{n} apartments", ctx_name(&ctx)),
            Box::new(move |_: &Cache| {
                let r = apartment_check(&ctx, n, oriented, samples, seed, cap)?;
                let msg = format!(
                    "{}/{} cycles, span rank {} of {}",
                    r.cycles, r.samples, r.span_rank, r.betti
                );
                Ok(ItemOutcome::new(r.all_cycles() && r.spans(), msg).data(serde_json::to_value(&r)?))
            }),
        ));
    }
    Ok(jobs)
}
