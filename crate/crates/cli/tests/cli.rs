use std::process::Command;

use abcov_cli::{argv_from_report, run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, REPORT_SCHEMA};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn call(args: &[&str]) -> Run {
    let mut argv = vec!["abcov"];
    argv.extend_from_slice(args);
    call_owned(argv.into_iter().map(String::from).collect())
}

fn call_owned(argv: Vec<String>) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn report(args: &[&str]) -> Value {
    let r = call(args);
    assert_eq!(r.code, EXIT_OK, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, report: &Value) {
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema errors {errors:?} in {report}");
}

/// Commands whose reports must validate, round trip and stay byte-stable.
const SAMPLES: &[&[&str]] = &[
    &["group", "--group", "Z/2 x Z/4"],
    &["group", "--group", "trivial"],
    &["basis", "--group", "Z/2 x Z/4", "--gens", "(1,0);(1,1)"],
    &["basis", "--group", "Z/36", "--gens", "2;3"],
    &["covers", "--group", "Z/2", "--ram", "1;1;1;1"],
    &["covers", "--group", "Z/2 x Z/2", "--ram", "(1,0);(0,1);(1,1)"],
    &["classify", "--group", "Z/2", "--ram", "1;1"],
    &["classify", "--group", "Z/2 x Z/2", "--ram", "(1,0);(0,1);(1,1)", "--oracle"],
    &["classify", "--group", "Z/3 x Z/3", "--ram", "(0,0)", "--oracle"],
    &["picard", "--group", "Z/2", "--ram", "1;1;1;1"],
    &["picard", "--group", "Z/4", "--ram", "1;1;2"],
    &["bielliptic", "--genus", "3", "--picard"],
    &["bielliptic", "--genus", "4", "--strata", "--picard"],
    &["oracle", "--mode", "monodromy", "--group", "Z/2", "--ram", "1;1"],
    &["oracle", "--mode", "torsion-locus", "--vector", "-4;4"],
    &["oracle", "--mode", "basis", "--max-order", "8"],
    &["oracle", "--mode", "subgroups", "--group", "Z/2 x Z/4"],
];

#[test]
fn spec_examples() {
    let r = report(&["classify", "--group", "Z/2", "--ram", "1;1"]);
    assert_eq!(r["payload"]["component_count"], 1);

    let r = report(&["bielliptic", "--genus", "3", "--picard"]);
    assert_eq!(r["payload"]["picard"]["ordered"], 14);
    assert_eq!(r["payload"]["picard"]["unordered"], 6);

    let r = report(&["oracle", "--mode", "subgroups", "--group", "Z/2 x Z/4"]);
    assert_eq!(r["payload"]["census"], 8);
    assert_eq!(r["payload"]["enumerated"], 8);
}

#[test]
fn payload_details() {
    let r = report(&["covers", "--group", "Z/2", "--ram", "1;1;1;1"]);
    assert_eq!(r["payload"]["genus"], 3);
    assert_eq!(r["payload"]["totally_ramified"], true);
    assert_eq!(r["payload"]["euler_characteristic"], "4");

    let r = report(&["picard", "--group", "Z/2", "--ram", "1;1;1;1"]);
    assert_eq!(r["payload"]["determinant"], "16");
    assert_eq!(r["payload"]["relations"]["relations"], 0);
    assert_eq!(r["payload"]["lincomb"][0], serde_json::json!(["0", "2", "2"]));

    let r = report(&["picard", "--group", "Z/2", "--ram", "1;1"]);
    assert_eq!(r["payload"]["relations"]["relations"], 1);
    assert_eq!(r["payload"]["relations"]["components"], 2);

    let r = report(&["classify", "--group", "Z/3 x Z/3", "--ram", "(0,0)", "--oracle"]);
    assert_eq!(r["payload"]["component_count"], 7);
    assert_eq!(r["payload"]["oracle"]["agrees"], true);

    let r = report(&["basis", "--group", "Z/36", "--gens", "2;3"]);
    assert_eq!(r["payload"]["valid"], true);
    assert_eq!(r["payload"]["unit_triangular"], false);
}

#[test]
fn exit_codes() {
    // usage errors
    for args in [
        &["classify", "--group", "Z/q", "--ram", "1"][..],
        &["classify", "--group", "Z/2"],
        &["frobnicate"],
        &["covers", "--group", "Z/2 x Z/2", "--ram", "(1,0,1)"],
        &["oracle", "--mode", "torsion-locus"],
        &["oracle", "--mode", "torsion-locus", "--vector", "1;x"],
    ] {
        let r = call(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}");
        assert!(r.stdout.is_empty(), "{args:?}");
        assert!(!r.stderr.is_empty(), "{args:?}");
    }
    // domain errors carry a structured report
    for (args, kind) in [
        (&["picard", "--group", "Z/2", "--ram", "1"][..], "EmptyModuli"),
        (&["covers", "--group", "Z/2", "--ram", "1;1;1"], "Unbalanced"),
        (&["bielliptic", "--genus", "1"], "InvalidGenus"),
        (
            &["oracle", "--max-states", "10", "--mode", "monodromy", "--group", "Z/6", "--ram", "1;5"],
            "StateSpaceTooLarge",
        ),
        (&["oracle", "--mode", "torsion-locus", "--vector", "0;0"], "DegenerateVector"),
    ] {
        let r = call(args);
        assert_eq!(r.code, EXIT_DOMAIN, "{args:?}");
        let v: Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(v["error"]["kind"], kind, "{args:?}");
        assert_valid(&validator(), &v);
    }
    let r = call(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("Usage"));
}

#[test]
fn reports_validate_round_trip_and_are_stable() {
    let v = validator();
    for args in SAMPLES {
        let first = call(args);
        assert_eq!(first.code, EXIT_OK, "{args:?}: {}", first.stderr);
        let again = call(args);
        assert_eq!(first.stdout, again.stdout, "not byte-stable: {args:?}");
        let rep: Value = serde_json::from_str(&first.stdout).unwrap();
        assert_valid(&v, &rep);
        let replay = call_owned(argv_from_report(&rep));
        assert_eq!(replay.code, EXIT_OK);
        assert_eq!(replay.stdout, first.stdout, "round trip changed {args:?}");
    }
}

#[test]
fn reports_for_acceptance_data_validate() {
    let v = validator();
    let mut checked = 0;
    for g in 2..=8 {
        let genus = g.to_string();
        for cmd in ["bielliptic --picard", "bielliptic --strata"] {
            let mut args: Vec<&str> = cmd.split(' ').collect();
            args.extend(["--genus", &genus]);
            assert_valid(&v, &report(&args));
            checked += 1;
        }
    }
    for (group, ram) in [
        ("Z/2", "1;1;1;1"),
        ("Z/4", "1;3"),
        ("Z/4", "1;1;1;1"),
        ("Z/3", "1;1;1"),
        ("Z/2 x Z/2", "(1,0);(0,1);(1,1)"),
        ("Z/2 x Z/4", "(0,2);(1,2);(1,0)"),
        ("Z/6", "1;2;3"),
    ] {
        for cmd in ["covers", "classify", "picard"] {
            let r = call(&[cmd, "--group", group, "--ram", ram]);
            assert!(r.code == EXIT_OK || r.code == EXIT_DOMAIN, "{cmd} {group} {ram}");
            assert_valid(&v, &serde_json::from_str(&r.stdout).unwrap());
            checked += 1;
        }
    }
    for vector in ["1;-1", "2;-2", "4;-4", "6;-6", "8;-4;-4", "-4;2;2"] {
        assert_valid(&v, &report(&["oracle", "--mode", "torsion-locus", "--vector", vector]));
        checked += 1;
    }
    assert!(checked > 30);
}

#[test]
fn text_output() {
    let r = call(&["--text", "group", "--group", "Z/6"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("cyclic: true"));
    assert!(r.stdout.contains("order: 6"));
    let r = call(&["--text", "--json", "group", "--group", "Z/6"]);
    assert!(serde_json::from_str::<Value>(&r.stdout).is_ok());
}

#[test]
fn strata_stream_as_json_lines() {
    let r = call(&["bielliptic", "--genus", "3", "--strata", "--stream"]);
    assert_eq!(r.code, EXIT_OK);
    let lines: Vec<Value> = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 14);
    assert_eq!(lines[0]["kind"], "Delta0_branch");
    let full = report(&["bielliptic", "--genus", "3", "--strata"]);
    assert_eq!(full["payload"]["strata"].as_array().unwrap(), &lines);
}

fn write_spec(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("spec.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn batch_rows(spec: &str, extra: &[&str]) -> (i32, Vec<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, spec);
    let mut args = vec!["batch", "--spec", &path];
    args.extend_from_slice(extra);
    let r = call(&args);
    let rows = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    (r.code, rows)
}

#[test]
fn batch_bielliptic_table() {
    let (code, rows) = batch_rows(r#"[{"kind": "bielliptic", "genus_min": 2, "genus_max": 8}]"#, &[]);
    assert_eq!(code, EXIT_OK);
    let ordered: Vec<u64> = rows.iter().map(|r| r["payload"]["picard"]["ordered"].as_u64().unwrap()).collect();
    assert_eq!(ordered, vec![3, 14, 60, 250, 1016, 4086, 16372]);
    let indices: Vec<u64> = rows.iter().map(|r| r["row"].as_u64().unwrap()).collect();
    assert_eq!(indices, (0..7).collect::<Vec<_>>());
    let v = validator();
    rows.iter().for_each(|r| assert_valid(&v, r));
}

#[test]
fn batch_etale_counts_match_oracle() {
    let (code, rows) = batch_rows(r#"[{"kind": "etale", "max_order": 8, "oracle": true}]"#, &[]);
    assert_eq!(code, EXIT_OK);
    // 1, 2, 3, 4 (two), 5, 6, 7, 8 (three)
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert_eq!(r["payload"]["oracle"]["agrees"], true, "{r}");
    }
}

#[test]
fn batch_edge_cases() {
    let (code, rows) = batch_rows("[]", &[]);
    assert_eq!((code, rows.len()), (EXIT_OK, 0));
    let (code, rows) = batch_rows("", &[]);
    assert_eq!((code, rows.len()), (EXIT_OK, 0));

    let spec = r#"[
        {"kind": "row", "command": "picard", "args": {"group": "Z/2", "ram": "1"}},
        {"kind": "row", "command": "nonsense"},
        {"kind": "row", "command": "group", "args": {"group": "Z/5"}}
    ]"#;
    let (code, rows) = batch_rows(spec, &[]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(rows[0]["error"]["kind"], "EmptyModuli");
    assert_eq!(rows[1]["error"]["kind"], "Usage");
    assert_eq!(rows[2]["payload"]["order"], 5);
    let v = validator();
    rows.iter().for_each(|r| assert_valid(&v, r));

    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(&dir, r#"[{"kind": "unknown"}]"#);
    assert_eq!(call(&["batch", "--spec", &bad]).code, EXIT_USAGE);
    assert_eq!(call(&["batch", "--spec", "/nonexistent/spec.json"]).code, EXIT_USAGE);
}

#[test]
fn batch_random_rows_are_seeded() {
    let spec = r#"[{"kind": "random_totally_ramified", "count": 12, "max_order": 12, "min_n": 2, "max_n": 5}]"#;
    let (_, a) = batch_rows(spec, &["--seed", "7"]);
    let (_, b) = batch_rows(spec, &["--seed", "7"]);
    let (_, c) = batch_rows(spec, &["--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    for r in &a {
        assert_eq!(r["payload"]["invertible"], true, "{r}");
        assert_eq!(r["payload"]["row_sums_match"], true, "{r}");
    }
}

#[test]
fn batch_writes_output_file_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, r#"[{"kind": "bielliptic", "genus_min": 2, "genus_max": 3}]"#);
    let out = dir.path().join("table.jsonl");
    let r = call(&["batch", "--spec", &spec, "--output", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);

    let r = call(&["--text", "batch", "--spec", &spec]);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("bielliptic") && lines[0].contains("ok"));
}

#[test]
fn binary_exit_codes_and_env_overrides() {
    let bin = env!("CARGO_BIN_EXE_abcov");
    let out = Command::new(bin).args(["group", "--group", "Z/4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));

    let out = Command::new(bin).args(["group", "--group", "Z/x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));

    let args = ["oracle", "--mode", "monodromy", "--group", "Z/6", "--ram", "1;5"];
    let out = Command::new(bin).args(args).env("ABCOV_MAX_STATES", "10").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DOMAIN));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "StateSpaceTooLarge");

    let out = Command::new(bin).args(["group", "--group", "Z/4"]).env("ABCOV_TEXT", "true").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("cyclic: true"));
}

#[test]
fn timing_is_opt_in() {
    let args = ["oracle", "--mode", "torsion-locus", "--vector", "2;-2"];
    let plain = report(&args);
    assert!(plain["payload"].get("wall_time_us").is_none());
    let mut timed_args = args.to_vec();
    timed_args.push("--timing");
    let timed = report(&timed_args);
    assert!(timed["payload"]["wall_time_us"].is_u64());
    assert_valid(&validator(), &timed);
}
