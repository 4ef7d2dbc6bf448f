use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrtmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&full)).unwrap()
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../docs/schemas/{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_matches(expected: &Value, v: &Value) -> bool {
    let one = |t: &str| match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_u64() || v.is_i64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => true,
    };
    match expected {
        Value::String(t) => one(t),
        Value::Array(ts) => ts.iter().any(|t| t.as_str().is_some_and(one)),
        _ => true,
    }
}

/// Structural subset of JSON Schema: type, required, properties, items, oneOf, enum.
fn conforms(s: &Value, v: &Value) -> bool {
    if let Some(t) = s.get("type") {
        if !type_matches(t, v) {
            return false;
        }
    }
    if let Some(options) = s.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            return false;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            return false;
        }
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        if alts.iter().filter(|a| conforms(a, v)).count() != 1 {
            return false;
        }
    }
    if let (Some(req), Some(obj)) = (s.get("required").and_then(Value::as_array), v.as_object()) {
        if !req.iter().all(|k| k.as_str().is_some_and(|k| obj.contains_key(k))) {
            return false;
        }
    }
    if let (Some(props), Some(obj)) = (s.get("properties").and_then(Value::as_object), v.as_object()) {
        for (k, sub) in props {
            if obj.get(k).is_some_and(|x| !conforms(sub, x)) {
                return false;
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        if !arr.iter().all(|x| conforms(items, x)) {
            return false;
        }
    }
    true
}

#[test]
fn sqrt_of_example_word() {
    assert_eq!(stdout(&["sqrt", "--a", "1", "--b", "0", "0101001010"]).trim(), "01010");
}

#[test]
fn doubling_orbits_for_seven() {
    assert_eq!(stdout(&["eq", "orbits", "--n", "7"]).trim(), "{0} {1,2,4} {3,5,6}");
}

#[test]
fn table1_csv_rows() {
    let out = stdout(&["table1", "--fib", "8,13", "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines, ["size,n,paper_n,status", "8,3,3,PASS", "13,4,4,PASS"]);
}

#[test]
fn dynamics_group_matches_top_level() {
    let a = stdout(&["table1", "--fib", "8"]);
    let b = stdout(&["dynamics", "table1", "--fib", "8"]);
    assert_eq!(a, b);
}

#[test]
fn factorization_of_example() {
    let out = stdout(&["factorize", "10010010100101001001010010"]);
    assert_eq!(
        out.lines().collect::<Vec<_>>(),
        ["S5 S4 S2 S1 S6", "100100.1010.0101.00.1001010010"]
    );
}

#[test]
fn exit_codes() {
    // Not a product of minimal squares: a violation.
    assert_eq!(run(&["factorize", "0110"]).status.code(), Some(1));
    assert_eq!(run(&["eq", "check", "0110"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["sqrt", "01x"]).status.code(), Some(2));
    assert_eq!(run(&["omega", "info", "--a", "0"]).status.code(), Some(2));
    assert_eq!(run(&["eq", "enumerate", "--params", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["table2", "--format", "json"]).status.code(), Some(0));
    assert_eq!(run(&["omega", "info", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["preimages", "--budget", "40", "--seed", "7", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), second.status.code());
}

#[test]
fn out_file_and_json_shorthand() {
    let dir = std::env::temp_dir().join(format!("sqrtmap-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t2.json");
    let p = path.to_str().unwrap();
    assert!(stdout(&["table2", "--json", p]).is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let estimates: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["estimate"].as_str().unwrap())
        .collect();
    assert_eq!(estimates, ["3.47", "4.16", "7.63", "13.19"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_kinds_agree() {
    // S = 01010010, so the block word SL is 0101001010010010 and its hex form is 0x5292.
    let literal = stdout(&["sqrt", "0101001010010010"]);
    assert_eq!(stdout(&["sqrt", "--input-kind", "blocks", "SL"]), literal);
    assert_eq!(stdout(&["sqrt", "0x5292"]), literal);
    let shifted = run(&["sqrt", "--shift", "2", "SL", "--input-kind", "blocks"]);
    let direct = run(&["sqrt", "01001010010010"]);
    assert_eq!(
        (shifted.stdout, shifted.status.code()),
        (direct.stdout, direct.status.code())
    );
}

#[test]
fn named_words_are_fixed_by_sqrt() {
    for name in ["gamma1", "gamma2"] {
        let root = json(&["sqrt", name, "--depth", "200"]);
        let word = json(&["sqrt", "--depth", "400", name]);
        let prefix = root["prefix"].as_str().unwrap();
        assert_eq!(prefix.len(), 200);
        // √Γ = Γ, so the first 200 letters of √(√Γ) repeat those of √Γ.
        assert!(word["prefix"].as_str().unwrap().starts_with(prefix));
    }
}

#[test]
fn classify_reports_type_and_prefix() {
    let v = json(&["omega", "classify", "--shift", "3", "--blocks", "SSLSL"]);
    assert_eq!(v["type"], "D");
    assert!(v.get("pi_prefix_len").is_some());
    assert_eq!(json(&["omega", "classify", "--blocks", "SL"])["type"], "A");
}

#[test]
fn json_outputs_follow_published_schemas() {
    let cases: [(&str, &[&str]); 17] = [
        ("sqrt", &["sqrt", "0101001010"]),
        ("sqrt", &["sqrt", "gamma2", "--depth", "30"]),
        ("factorize", &["factorize", "0101001010"]),
        ("omega-info", &["omega", "info", "--c", "2"]),
        ("omega-gamma", &["omega", "gamma", "--j", "3"]),
        ("omega-classify", &["omega", "classify", "--shift", "5", "gamma1"]),
        ("classify", &["classify", "SSL+gamma1"]),
        ("orbit", &["orbit", "SSS", "--shift", "4", "--steps", "4"]),
        ("table1", &["table1", "--fib", "8"]),
        ("table2", &["table2"]),
        ("preimages", &["preimages", "0100101001001010", "--head", "8"]),
        ("limit-set", &["limit-set", "--budget", "4"]),
        ("periodic-points", &["periodic-points", "--budget", "5"]),
        ("eq-certificate", &["eq", "check", "01010010010"]),
        ("eq-enumerate", &["eq", "enumerate", "--bmax", "16"]),
        ("eq-orbits", &["eq", "orbits", "--n", "9"]),
        ("orbits", &["orbits", "--n", "7"]),
    ];
    for (name, args) in cases {
        let v = json(args);
        assert!(conforms(&schema(name), &v), "{args:?} does not follow {name}: {v}");
    }
    // Injectivity output exits 1 when a two-preimage target falls outside the zSΓ form.
    let out = run(&["preimages", "--budget", "30", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(conforms(&schema("injectivity"), &v));
}

#[test]
fn schema_checker_rejects_wrong_shapes() {
    let s = schema("eq-certificate");
    assert!(!conforms(&s, &serde_json::json!({"word": "01", "roots": []})));
    assert!(!conforms(
        &s,
        &serde_json::json!({"word": "01", "roots": [], "verified": "yes"})
    ));
    assert!(conforms(
        &s,
        &serde_json::json!({"word": "01", "roots": ["S2"], "verified": true})
    ));
}
