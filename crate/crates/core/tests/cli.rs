mod common;

use std::io::Write;
use std::process::Command;

use symbiosis::cli::run;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symbiosis"))
}

fn write_doc(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn fig1() -> String {
    common::fig1_path().display().to_string()
}

#[test]
fn validate_case_study() {
    let out = bin().args(["validate", &fig1()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "valid: 6 firms, 7 edges\n"
    );
}

#[test]
fn validate_negative_weight() {
    let doc = write_doc(
        r#"{"format_version":"1","firms":["a","b"],"edges":[{"a":"a","b":"b","w":"-3"}]}"#,
    );
    let out = bin()
        .args(["validate", doc.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("NegativeWeight"), "{text}");
    assert!(text.contains("IsolatedFirm"), "{text}");
}

#[test]
fn validate_malformed() {
    let doc = write_doc("{\"format_version\": \"1\",\n \"firms\": [1, 2]\n}");
    let out = bin()
        .args(["validate", doc.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("line 2"), "{text}");
}

#[test]
fn missing_file_is_input_error() {
    let out = run(["symbiosis", "validate", "/nonexistent/graph.json"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("cannot read"));
}

#[test]
fn allocate_table() {
    let out = run(["symbiosis", "allocate", &fig1(), "--tc", "100"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    for share in ["19.06", "12.08", "13.55", "32.86", "9.76", "12.70"] {
        assert!(
            out.stdout.contains(share),
            "missing {share}\n{}",
            out.stdout
        );
    }
    assert!(out.stdout.contains("efficiency residual 0/1"));
}

#[test]
fn allocate_json() {
    let out = run([
        "symbiosis",
        "allocate",
        &fig1(),
        "--tc",
        "100",
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["shares_exact"][3], "573650/17459");
    assert_eq!(v["shares_rendered"][3], "32.86");
    assert_eq!(v["index"][0]["sigma"], "13309/34918");
    assert_eq!(v["efficiency_residual"], "0/1");
    assert_eq!(v["alpha"], "1/1");
    assert!(v.get("checks").is_none());
}

#[test]
fn allocate_with_checks_and_weights() {
    let out = run([
        "symbiosis",
        "allocate",
        &fig1(),
        "--tc",
        "0.5",
        "--alpha",
        "2",
        "--beta",
        "3/2",
        "--precision",
        "4",
        "--format",
        "json",
        "--with-checks",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["beta"], "3/2");
    assert_eq!(v["tau"], "1/2");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["holds"] == true));
}

#[test]
fn allocate_zero_cost() {
    let out = run(["symbiosis", "allocate", &fig1(), "--tc", "0"]);
    assert_eq!(out.code, 1);
    assert!(
        out.stderr.contains("InvalidTransactionCost"),
        "{}",
        out.stderr
    );
}

#[test]
fn output_is_deterministic() {
    let args = [
        "allocate",
        &fig1(),
        "--tc",
        "100",
        "--format",
        "json",
        "--with-checks",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let c = run([
        "symbiosis",
        "check",
        "--suite",
        "all",
        "--seed",
        "3",
        "--trials",
        "5",
        "--format",
        "json",
    ]);
    let d = run([
        "symbiosis",
        "check",
        "--suite",
        "all",
        "--seed",
        "3",
        "--trials",
        "5",
        "--format",
        "json",
    ]);
    assert_eq!(c, d);
}

#[test]
fn index_table_and_oracle() {
    let plain = run(["symbiosis", "index", &fig1()]);
    assert_eq!(plain.code, 0);
    let row1 = plain.stdout.lines().nth(1).unwrap();
    assert!(
        row1.contains("7/34") && row1.contains("13309/34918"),
        "{row1}"
    );

    let exact = run(["symbiosis", "index", &fig1(), "--exact"]);
    assert_eq!(exact.code, 0, "{}", exact.stderr);
    assert_eq!(exact.stdout, format!("{}oracle: match\n", plain.stdout));
}

#[test]
fn index_two_firms() {
    let doc = write_doc(
        r#"{"format_version":"1","firms":["x","y"],"edges":[{"a":"x","b":"y","w":"5"}]}"#,
    );
    let out = run([
        "symbiosis",
        "index",
        doc.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v[0]["sigma"], "1/1");
    assert_eq!(v[1]["sigma"], "1/1");
}

#[test]
fn centrality_tables() {
    let out = run(["symbiosis", "centrality", &fig1()]);
    assert_eq!(out.code, 0);
    let exact: Vec<&str> = out
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(exact, ["5/7", "5/8", "5/8", "1/1", "5/9", "5/9"]);
    assert!(out.stdout.contains("0.7143"));

    let k4 = write_doc(
        r#"{"format_version":"1","firms":["a","b","c","d"],"edges":[
            {"a":"a","b":"b","w":"1"},{"a":"a","b":"c","w":"1"},{"a":"a","b":"d","w":"1"},
            {"a":"b","b":"c","w":"1"},{"a":"b","b":"d","w":"1"},{"a":"c","b":"d","w":"1"}]}"#,
    );
    let out = run(["symbiosis", "centrality", k4.path().to_str().unwrap()]);
    assert_eq!(out.stdout.matches("1/1").count(), 4);

    let path = write_doc(
        r#"{"format_version":"1","firms":["a","b","c"],"edges":[
            {"a":"a","b":"b","w":"4"},{"a":"b","b":"c","w":"2"}]}"#,
    );
    let out = run(["symbiosis", "centrality", path.to_str_lossy()]);
    let exact: Vec<&str> = out
        .stdout
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(exact, ["2/3", "1/1", "2/3"]);
}

trait PathStr {
    fn to_str_lossy(&self) -> &str;
}

impl PathStr for tempfile::NamedTempFile {
    fn to_str_lossy(&self) -> &str {
        self.path().to_str().unwrap()
    }
}

#[test]
fn check_case_study_all() {
    let out = run(["symbiosis", "check", &fig1(), "--suite", "all"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("0 failed"));
    assert!(!out.stdout.contains("FAIL"));
}

#[test]
fn check_random_trials() {
    let out = run([
        "symbiosis",
        "check",
        "--suite",
        "game-properties",
        "--seed",
        "42",
        "--trials",
        "50",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert!(out.stdout.contains("50 graph(s)"), "{}", out.stdout);
}

#[test]
fn check_beyond_limit_is_graceful() {
    let g = symbiosis::verify::generate_graph(&symbiosis::verify::GraphGenSpec::new(14, 0.4, 1))
        .unwrap();
    let doc = symbiosis::cli::GraphDocument::from_graph(&g);
    let file = write_doc(&serde_json::to_string(&doc).unwrap());
    let out = run(["symbiosis", "check", file.to_str_lossy(), "--suite", "core"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("enumeration limit"), "{}", out.stderr);
}

#[test]
fn exact_index_honours_env_limit() {
    let out = bin()
        .args(["index", &fig1(), "--exact"])
        .env("SYMBIOSIS_ENUMERATION_LIMIT", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 4"));
}
