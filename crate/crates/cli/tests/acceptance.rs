//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test -p buildings-lab --test acceptance`; pass criterion
//! numbers as arguments to run a subset.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::{Duration, Instant};

use buildings_core::builders::{build, BuildOptions};
use buildings_core::conditions::{classify_pair, Witness};
use buildings_core::homology::{four_loop_check, GroupVerdict, DEFAULT_EFFORT};
use buildings_core::ranks::{cross_validate, RankVariant};
use buildings_core::{Classification, ComplexKind, PrimeContext, RingElement, RingId};
use buildings_lab::apartments::apartment_check;
use buildings_lab::suites::{run_suite, ContextSpec, ItemStatus, SuiteConfig, SuiteName, SuiteReport, CLASSIFIED_PAIRS};
use buildings_lab::Cache;

const CLASSIFICATION_BUDGET: Duration = Duration::from_secs(60);
const SOLOMON_TITS_BUDGET: Duration = Duration::from_secs(5 * 60);
const RANKS_BUDGET: Duration = Duration::from_secs(10 * 60);
const CONNECTIVITY_BUDGET: Duration = Duration::from_secs(15 * 60);
const LIFT_SAMPLES: usize = 100;
const APARTMENT_SAMPLES: usize = 200;
const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ctx(ring: &str, p: &str) -> PrimeContext {
    ContextSpec::from_str(&format!("{ring}:{p}")).unwrap().resolve(1 << 16).unwrap()
}

fn suite(name: SuiteName, config: SuiteConfig, cache: &Cache) -> SuiteReport {
    run_suite(name, &config, cache).unwrap().0
}

fn failing(report: &SuiteReport) -> Vec<String> {
    report
        .items
        .iter()
        .filter(|i| i.status != ItemStatus::Pass)
        .map(|i| format!("{} [{:?}] {}", i.id, i.status, i.message))
        .collect()
}

fn within(start: Instant, budget: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t <= budget, format!("{:.1}s of {}s", t.as_secs_f64(), budget.as_secs()))
}

/// The classification table, with condition (5) trivial within default effort.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (ring, p, expected) in CLASSIFIED_PAIRS {
        let r = classify_pair(&ctx(ring, p), DEFAULT_EFFORT).unwrap();
        let mut ok = r.classification == expected;
        if expected == Classification::ConditionsOneToFive {
            ok &= matches!(r.condition_5.witness, Witness::Connectivity { pi1: GroupVerdict::Trivial, .. });
        }
        if !ok {
            bad.push(format!("{ring}:{p} gave {}", r.classification));
        }
    }
    let (fast, t) = within(start, CLASSIFICATION_BUDGET);
    outcome(bad.is_empty() && fast, format!("{} pairs classified as claimed, {t}; mismatches {bad:?}", CLASSIFIED_PAIRS.len() - bad.len()))
}

/// Over Z with U = {±1}: conditions hold for p ∈ {3, 5} only.
fn criterion_2() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (p, holds) in [(3, true), (5, true), (7, false), (11, false), (13, false)] {
        let f = PrimeContext::new(RingId::Integers, RingElement::from_i64(RingId::Integers, p, 0)).unwrap();
        let r = classify_pair(&f, DEFAULT_EFFORT).unwrap();
        let verdicts: Vec<String> = r.conditions().iter().map(|c| c.verdict.to_string()).collect();
        let mut ok = r.all_pass() == holds;
        if !holds {
            ok &= r.index != 2 && r.condition_1.verdict.to_string() == "fail";
        }
        pass &= ok;
        lines.push(format!("p={p} index {} {verdicts:?}{}", r.index, if ok { "" } else { " MISMATCH" }));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_3(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let config = SuiteConfig {
        q_max: Some(9),
        n_max: Some(3),
        ..SuiteConfig::default()
    };
    let r = suite(SuiteName::SolomonTits, config, cache);
    let full_checked = r
        .items
        .iter()
        .filter(|i| !i.data["expected_top_rank"].is_null() && i.id.contains("TU"))
        .count();
    let (fast, t) = within(start, SOLOMON_TITS_BUDGET);
    let bad = failing(&r);
    outcome(
        bad.is_empty() && fast,
        format!("{} buildings with wedge profile, {full_checked} oriented ranks = q^C(n,2) checked, {t}; failures {bad:?}", r.items.len()),
    )
}

fn criterion_4(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let r = suite(SuiteName::Ranks, SuiteConfig::default(), cache);
    let bad = failing(&r);
    let t2 = r.items.iter().filter(|i| i.id.ends_with("t_2")).count();
    let mut arbitration = Vec::new();
    for (ring, p) in [("z", "3"), ("z", "5"), ("zi", "3")] {
        let table = cross_validate(&ctx(ring, p), 3, Some(u64::MAX)).unwrap();
        let e = &table.entries[2];
        let consistent: Vec<&str> = table.consistent_variants().into_iter().map(RankVariant::name).collect();
        arbitration.push(format!(
            "{ring}:{p} oracle {} cosets {} orbits {} -> {consistent:?}",
            e.oracle.as_deref().unwrap_or("-"),
            e.cosets,
            e.orbits
        ));
    }
    let (fast, t) = within(start, RANKS_BUDGET);
    outcome(
        bad.is_empty() && fast,
        format!("t_2 formula = oracle on {t2} fields; t_3: {}; {t}; failures {bad:?}", arbitration.join("; ")),
    )
}

fn criterion_5(cache: &Cache) -> Outcome {
    let r = suite(SuiteName::Ranks, SuiteConfig::default(), cache);
    let mut bad = Vec::new();
    let mut equalities = 0;
    for i in &r.items {
        let oracle = num_bigint::BigInt::from_str(i.data["oracle"].as_str().unwrap()).unwrap();
        let bound = num_bigint::BigInt::from_str(i.data["lower_bound"].as_str().unwrap()).unwrap();
        let full = i.data["equality_expected"].as_bool().unwrap();
        if oracle < bound || (full && oracle != bound) {
            bad.push(i.id.clone());
        }
        equalities += usize::from(full);
    }
    outcome(
        bad.is_empty(),
        format!("{} oracle entries above the bound, equality on {equalities} with U = F×; violations {bad:?}", r.items.len()),
    )
}

fn criterion_6(cache: &Cache) -> Outcome {
    let start = Instant::now();
    let config = SuiteConfig {
        q_max: Some(5),
        n_max: Some(3),
        ..SuiteConfig::default()
    };
    let r = suite(SuiteName::Connectivity, config, cache);
    let top = r
        .items
        .iter()
        .filter(|i| i.id.ends_with("top") && i.data["applicable"] == true)
        .count();
    let (fast, t) = within(start, CONNECTIVITY_BUDGET);
    let bad = failing(&r);
    outcome(
        bad.is_empty() && fast,
        format!("{} items, {top} top-degree checks on qualifying fields, {t}; failures {bad:?}", r.items.len()),
    )
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (ring, p, expected) in CLASSIFIED_PAIRS {
        if expected != Classification::ConditionsOneToFive {
            continue;
        }
        let f = ctx(ring, p);
        let c = build(&f, ComplexKind::BDA, 2, 0, &BuildOptions::default()).unwrap();
        let r = four_loop_check(&c, &f).unwrap();
        let pi1 = match classify_pair(&f, DEFAULT_EFFORT).unwrap().condition_5.witness {
            Witness::Connectivity { pi1, .. } => pi1,
            _ => GroupVerdict::Unknown,
        };
        let ok = r.triangles_filled && (r.all_coned() || pi1 == GroupVerdict::Trivial);
        pass &= ok;
        lines.push(format!(
            "{ring}:{p} triangles filled {}, {} loops, {} without a cone, pi1 {pi1}",
            r.triangles_filled,
            r.loops_checked,
            r.cone_failures.len()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_8(cache: &Cache) -> Outcome {
    let config = SuiteConfig {
        q_max: Some(13),
        n_max: Some(3),
        samples: LIFT_SAMPLES,
        seed: SEED,
        ..SuiteConfig::default()
    };
    let r = suite(SuiteName::Lifting, config, cache);
    let bad = failing(&r);
    outcome(bad.is_empty(), format!("{} (field, n) pairs x {LIFT_SAMPLES} matrices; failures {bad:?}", r.items.len()))
}

fn criterion_9() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (ring, p, oriented) in [("z", "3", false), ("zi", "3", true)] {
        let f = ctx(ring, p);
        let r = apartment_check(&f, 3, oriented, APARTMENT_SAMPLES, SEED, u64::MAX).unwrap();
        pass &= r.all_cycles() && r.spans();
        let mut line = format!(
            "{}_3 over F_{}: {}/{} cycles, span rank {} of {}",
            if oriented { "TU" } else { "T" },
            r.q,
            r.cycles,
            r.samples,
            r.span_rank,
            r.betti
        );
        if r.betti > r.samples {
            line.push_str(&format!(" ({} chains span at most rank {})", r.samples, r.samples));
        }
        lines.push(line);
    }
    outcome(pass, lines.join("; "))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    let suites = [
        (SuiteName::SolomonTits, Some(9)),
        (SuiteName::Ranks, None),
        (SuiteName::Connectivity, Some(5)),
        (SuiteName::Conditions, None),
    ];
    for (name, q_max) in suites {
        let config = SuiteConfig {
            q_max,
            ..SuiteConfig::default()
        };
        let cold = suite(name, config.clone(), &Cache::new(dir.path()));
        let warm = suite(name, config, &Cache::new(dir.path()));
        let same = serde_json::to_vec(&cold).unwrap() == serde_json::to_vec(&warm).unwrap();
        let complexes: usize = cold.items.iter().map(|i| i.complexes.len()).sum();
        let infra = cold.infrastructure_ok() && warm.infrastructure_ok();
        pass &= same && infra;
        lines.push(format!("{}: {complexes} complexes, checks {infra}, identical {same}", name.name()));
    }
    outcome(pass, lines.join("; "))
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cache_dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(cache_dir.path());
    let criteria: Vec<(u32, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(|| criterion_3(&cache))),
        (4, Box::new(|| criterion_4(&cache))),
        (5, Box::new(|| criterion_5(&cache))),
        (6, Box::new(|| criterion_6(&cache))),
        (7, Box::new(criterion_7)),
        (8, Box::new(|| criterion_8(&cache))),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = Vec::new();
    for (n, run) in &criteria {
        if !selected.is_empty() && !selected.contains(n) {
            continue;
        }
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        println!(
            "criterion {n}: {} {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(*n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
