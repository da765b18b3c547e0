use std::path::Path;
use std::process::{Command, Output};

use buildings_core::ranks::RankTable;
use buildings_core::ConditionReport;
use buildings_lab::tables::{from_csv, rank_table_from_rows, ConditionRow, RankRow};
use serde_json::Value;

fn bin(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_buildings-lab"))
        .args(args)
        .env("BUILDINGS_LAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success() || o.status.code() == Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn validate(schema: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "{msgs:?}");
}

#[test]
fn nu_and_ring_info() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout(&bin(dir.path(), &["nu", "z", "3"])), "3\n");
    assert_eq!(stdout(&bin(dir.path(), &["nu", "gaussian", "2"])), "2\n");
    let v = json(&bin(dir.path(), &["ring-info", "zi", "--json"]));
    assert_eq!(v["units"].as_array().unwrap().len(), 4);
    let v = json(&bin(dir.path(), &["field", "zi", "3", "--json"]));
    assert_eq!(v["q"], 9);
    assert_eq!(v["index"], 2);
}

#[test]
fn conditions_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(dir.path(), &["conditions", "zw", "1+4w", "--json"]));
    validate("condition-report", &v);
    let report: ConditionReport = serde_json::from_value(v).unwrap();
    assert_eq!(report.classification.to_string(), "conditions-1-to-5");
    let csv = stdout(&bin(dir.path(), &["conditions", "zw", "1+4w", "--csv"]));
    let rows: Vec<ConditionRow> = from_csv(&csv).unwrap();
    assert_eq!(rows, vec![ConditionRow::from(&report)]);
}

#[test]
fn scan_csv_matches_json() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(dir.path(), &["scan", "zi", "--norm-max", "30", "--json"]));
    let reports: Vec<ConditionReport> = serde_json::from_value(v["reports"].clone()).unwrap();
    for r in &reports {
        validate("condition-report", &serde_json::to_value(r).unwrap());
    }
    let rows: Vec<ConditionRow> = from_csv(&stdout(&bin(dir.path(), &["scan", "zi", "--norm-max", "30", "--csv"]))).unwrap();
    assert_eq!(rows, reports.iter().map(ConditionRow::from).collect::<Vec<_>>());
    assert!(rows.len() >= 5);
}

#[test]
fn rank_table_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ranks", "z", "5", "--n-max", "3", "--oracle"];
    let v = json(&bin(dir.path(), &[&args[..], &["--json"]].concat()));
    validate("rank-table", &v);
    let table: RankTable = serde_json::from_value(v).unwrap();
    assert_eq!(table.entries[2].value, "621");
    let rows: Vec<RankRow> = from_csv(&stdout(&bin(dir.path(), &[&args[..], &["--csv"]].concat()))).unwrap();
    assert_eq!(rank_table_from_rows(&rows).unwrap(), table);
}

#[test]
fn build_then_homology_and_pi1_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(dir.path(), &["complex", "build", "bda", "zi", "3", "--n", "2", "--json"]));
    assert_eq!(v["counts"], serde_json::json!([20, 90, 120]));
    let key = v["key"].as_str().unwrap().to_string();
    let h = json(&bin(dir.path(), &["homology", &key, "--torsion", "--json"]));
    validate("homology", &h);
    assert_eq!(h["betti"], serde_json::json!([0, 0, 49]));
    let p = json(&bin(dir.path(), &["pi1", &key, "--json"]));
    validate("pi1", &p);
    assert_eq!(p["verdict"], "trivial");

    // a corrupted entry is a miss: homology reports it, a rebuild restores it
    let path = Path::new(v["path"].as_str().unwrap()).to_path_buf();
    std::fs::write(&path, "sha256 0000\nnot a complex").unwrap();
    assert_eq!(bin(dir.path(), &["homology", &key]).status.code(), Some(2));
    bin(dir.path(), &["complex", "build", "bda", "zi", "3", "--n", "2"]);
    assert!(bin(dir.path(), &["homology", &key]).status.success());
}

#[test]
fn homology_of_a_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.txt");
    let o = bin(dir.path(), &["complex", "build", "tu", "zi", "3", "--n", "3", "--out", file.to_str().unwrap()]);
    assert!(o.status.success());
    let h = json(&bin(dir.path(), &["homology", file.to_str().unwrap(), "--json"]));
    assert_eq!(h["betti"], serde_json::json!([0, 3277]));
}

#[test]
fn cap_is_an_error_for_builds_and_per_item_in_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["complex", "build", "b", "z", "5", "--n", "3", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    let o = bin(dir.path(), &["verify", "--suite", "connectivity", "--ctx", "z:3", "--n-max", "2", "--cap", "10", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    validate("suite-report", &v);
    assert!(v["items"].as_array().unwrap().iter().any(|i| i["status"] == "capped"));
}

#[test]
fn empty_context_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["verify", "--suite", "solomon-tits", "--q-max", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["items"], serde_json::json!([]));
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"contexts": []}"#).unwrap();
    for suite in ["conditions", "ranks", "lifting", "connectivity", "apartments"] {
        let o = bin(dir.path(), &["verify", "--suite", suite, "--config", config.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn strict_flag_reaches_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "conditions", "--ctx", "zi:3", "--json"];
    let lenient = json(&bin(dir.path(), &args));
    assert_eq!(lenient["strict"], false);
    let o = bin(dir.path(), &[&args[..], &["--strict"]].concat());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["strict"], true);
}

#[test]
fn suite_files_manifest_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let manifest = dir.path().join("m.json");
    let o = bin(
        dir.path(),
        &[
            "verify",
            "--suite",
            "ranks",
            "--ctx",
            "z:5",
            "--ctx",
            "zi:3",
            "--n-max",
            "3",
            "--out",
            out.to_str().unwrap(),
            "--manifest",
            manifest.to_str().unwrap(),
        ],
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("ranks.json")).unwrap()).unwrap();
    validate("suite-report", &report);
    assert!(out.join("ranks.txt").exists());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    validate("manifest", &m);
    assert!(!m["cache_keys"].as_array().unwrap().is_empty());
    assert!(m["output_digests"]["ranks.json"].is_string());

    let again = bin(dir.path(), &["rerun", manifest.to_str().unwrap()]);
    assert!(again.status.success());
    assert!(stdout(&again).ends_with("rerun: outputs identical\n"));
}

#[test]
fn warm_cache_reproduces_suite_json() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--suite", "solomon-tits", "--q-max", "5", "--json"];
    let cold = bin(dir.path(), &args);
    let warm = bin(dir.path(), &args);
    assert!(cold.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    validate("suite-report", &json(&cold));
}

#[test]
fn lift_given_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(dir.path(), &["lift", "zi", "3", "--matrix", "2 0; 0 2", "--json"]));
    assert_eq!(v[0]["determinant"], "1");
    assert_eq!(v[0]["reduces_to_matrix"], true);
    let o = bin(dir.path(), &["lift", "zi", "3", "--matrix", "1 0; 0 2"]);
    assert_eq!(o.status.code(), Some(2));
}
