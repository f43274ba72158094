//! End-to-end tests of the command-line interface, including schema
//! validation of the JSON-lines output and the cache behavior.

use std::collections::BTreeSet;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthobound"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("spawn orthobound");
    assert!(
        out.status.success(),
        "command {:?} failed: {}\n{}",
        args,
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn bounds_all_n16_reports_chain_and_chi() {
    let text = run_ok(&["bounds", "--n", "16", "--method", "all"]);
    assert!(text.contains("chain: 2304 <= alpha(Omega(16)) <= 2304"), "{text}");
    assert!(text.contains("chi(Omega(16)) >= 29"), "{text}");
    assert!(text.contains("2,304.00"), "{text}");
}

#[test]
fn bounds_lower_n8_pins_alpha() {
    let text = run_ok(&["bounds", "--n", "8", "--method", "lower", "--format", "csv"]);
    let line = text.lines().nth(1).unwrap();
    assert!(line.starts_with("8,lower,4,32,32,32,exact"), "{line}");
    let ratio = run_ok(&["bounds", "--n", "8", "--method", "ratio", "--format", "csv"]);
    assert!(ratio.lines().nth(1).unwrap().contains(",32,"), "{ratio}");
}

#[test]
fn bounds_code_mode_requires_forbidden() {
    let out = bin().args(["bounds", "--n", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "usage errors exit with 1");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("multiple of 4"), "{err}");
}

#[test]
fn bounds_unknown_method_is_usage_error() {
    let out = bin()
        .args(["bounds", "--n", "16", "--method", "sos"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_forbidden_range_syntax() {
    // Distance range 1..7 on n=7 words: the singleton bound (repetition-
    // style codes aside, the LP still solves); just check it runs and the
    // forbidden set is parsed as 1..=7.
    let text = run_ok(&[
        "bounds", "--n", "7", "--method", "delsarte", "--forbidden", "1..7", "--format", "jsonl",
    ]);
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["forbidden"], serde_json::json!([1, 2, 3, 4, 5, 6, 7]));
    assert!((rec["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

// ---------------------------------------------------------------------------
// JSON schema validation (minimal JSON-Schema interpreter for our records)
// ---------------------------------------------------------------------------

fn type_matches(ty: &str, v: &serde_json::Value) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => false,
    }
}

fn validate(schema: &serde_json::Value, v: &serde_json::Value) -> Result<(), String> {
    if let Some(c) = schema.get("const") {
        if c != v {
            return Err(format!("expected const {c}, got {v}"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(|e| e.as_array()) {
        if !options.contains(v) {
            return Err(format!("{v} not in enum {options:?}"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            serde_json::Value::String(s) => type_matches(s, v),
            serde_json::Value::Array(list) => list
                .iter()
                .any(|s| s.as_str().map(|s| type_matches(s, v)).unwrap_or(false)),
            _ => false,
        };
        if !ok {
            return Err(format!("type mismatch: want {ty}, got {v}"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(|m| m.as_f64()) {
        if let Some(x) = v.as_f64() {
            if x < min {
                return Err(format!("{x} below minimum {min}"));
            }
        }
    }
    if let Some(pat) = schema.get("pattern").and_then(|p| p.as_str()) {
        // Only the anchored hex pattern is used in the schema.
        if let Some(s) = v.as_str() {
            let ok = pat == "^[0-9a-f]{16}$"
                && s.len() == 16
                && s.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase());
            if !ok {
                return Err(format!("{s} does not match {pat}"));
            }
        }
    }
    if let Some(req) = schema.get("required").and_then(|r| r.as_array()) {
        let obj = v
            .as_object()
            .ok_or_else(|| "required on non-object".to_string())?;
        for key in req {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("missing required field {key}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        if let Some(obj) = v.as_object() {
            for (key, sub) in props {
                if let Some(val) = obj.get(key) {
                    validate(sub, val).map_err(|e| format!("{key}: {e}"))?;
                }
            }
            if schema.get("additionalProperties") == Some(&serde_json::Value::Bool(false)) {
                for key in obj.keys() {
                    if !props.contains_key(key) {
                        return Err(format!("unexpected field {key}"));
                    }
                }
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = v.as_array() {
            for (i, item) in arr.iter().enumerate() {
                validate(items, item).map_err(|e| format!("[{i}]: {e}"))?;
            }
        }
    }
    Ok(())
}

#[test]
fn jsonl_records_validate_against_shipped_schema() {
    let schema: serde_json::Value = serde_json::from_str(include_str!(
        "../schemas/bound_report.v1.json"
    ))
    .unwrap();
    let text = run_ok(&["bounds", "--n", "16", "--method", "all", "--format", "jsonl"]);
    let mut count = 0;
    for line in text.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        validate(&schema, &rec).unwrap_or_else(|e| panic!("schema violation: {e}\n{line}"));
        count += 1;
    }
    assert_eq!(count, 5, "all five methods emit one record each");
}

#[test]
fn library_reports_also_validate() {
    // The cache stores the same records the CLI prints; validate one from
    // the library path directly.
    let schema: serde_json::Value = serde_json::from_str(include_str!(
        "../schemas/bound_report.v1.json"
    ))
    .unwrap();
    let cfg = orthobound::sdp::SolverConfig::default();
    let forbidden: BTreeSet<u32> = [4].into_iter().collect();
    let report = orthobound::report::compute_bound(
        8,
        orthobound::report::Method::Schrijver,
        Some(&forbidden),
        &cfg,
    )
    .unwrap();
    let v = serde_json::to_value(&report).unwrap();
    validate(&schema, &v).unwrap();
}

// ---------------------------------------------------------------------------
// table1, export/solve, cache
// ---------------------------------------------------------------------------

#[test]
fn table1_n16_row() {
    let text = run_ok(&["table1", "--max-n", "16", "--format", "csv"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,lower,laurent,schrijver,ratio_floor");
    let row = lines.next().unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[0], "16");
    assert_eq!(cells[1], "2304");
    assert!(cells[2].starts_with("2304"), "{row}");
    assert!(cells[3].starts_with("2304"), "{row}");
    assert_eq!(cells[4], "4096");
}

#[test]
fn export_solve_roundtrip_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s8.dat-s");
    run_ok(&[
        "export",
        "--n",
        "8",
        "--flavor",
        "schrijver",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = run_ok(&["solve", "--in", path.to_str().unwrap()]);
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!((rec["objective"].as_f64().unwrap() - 32.0).abs() < 1e-3, "{rec}");
    // Byte-stable double export.
    let path2 = dir.path().join("s8b.dat-s");
    run_ok(&[
        "export",
        "--n",
        "8",
        "--flavor",
        "schrijver",
        "--out",
        path2.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(&path).unwrap(),
        std::fs::read(&path2).unwrap()
    );
}

#[test]
fn verify_oracles_exit_zero() {
    for args in [
        vec!["verify", "--oracle", "blockdiag", "--n", "4", "--samples", "3"],
        vec!["verify", "--oracle", "border", "--n", "4", "--samples", "3"],
        vec!["verify", "--oracle", "stableset", "--n", "8"],
        vec!["verify", "--oracle", "prop1", "--n", "12"],
        vec!["verify", "--oracle", "corollary", "--n", "12"],
    ] {
        let text = run_ok(&args);
        let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(rec["pass"], serde_json::json!(true), "{args:?}");
    }
}

#[test]
fn solver_non_convergence_exits_2() {
    let out = bin()
        .args(["bounds", "--n", "16", "--method", "schrijver", "--max-iter", "1", "--no-cache"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "non-convergence must exit 2");
}

#[test]
fn table1_zero_budget_skips_sdp_cells() {
    let text = run_ok(&["table1", "--max-n", "16", "--format", "csv", "--budget-secs", "0"]);
    let row = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[1], "2304", "exact cells still fill in");
    assert_eq!(cells[2], "skipped");
    assert_eq!(cells[3], "skipped");
    assert_eq!(cells[4], "4096");
}

#[test]
fn cache_appends_once_and_reuses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let run = || {
        let out = bin()
            .args(["bounds", "--n", "8", "--method", "schrijver", "--format", "jsonl"])
            .env("ORTHOBOUND_CACHE", cache.to_str().unwrap())
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run();
    let lines_after_first = std::fs::read_to_string(&cache).unwrap().lines().count();
    assert_eq!(lines_after_first, 1);
    let second = run();
    let lines_after_second = std::fs::read_to_string(&cache).unwrap().lines().count();
    assert_eq!(lines_after_second, 1, "cache hit must not append");
    // The cached record is returned verbatim.
    assert_eq!(first, second);
}
