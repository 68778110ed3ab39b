use std::path::PathBuf;
use std::process::Command;

use fredholm_lab::cli::{run_args, Rendered};
use jsonschema::JSONSchema;
use serde_json::Value;

fn schema(command: &str) -> JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{command}.schema.json"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&value).expect("schema compiles")
}

fn run(args: &[&str]) -> Rendered {
    run_args(std::iter::once("fredholm-lab").chain(args.iter().copied())).unwrap()
}

fn assert_valid(command: &str, text: &str) -> Value {
    let doc: Value = serde_json::from_str(text).unwrap();
    let compiled = schema(command);
    if let Err(errors) = compiled.validate(&doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{command} output violates its schema:\n{}", msgs.join("\n"));
    }
    doc
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fredholm-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn every_command_validates_against_its_schema() {
    let csv = temp_file("m.csv", "1, 2i\n0.5-1i, 3\n");
    let json = temp_file("m.json", "[[1, 2], [3, 4]]");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("toeplitz-index", vec!["toeplitz-index", "--symbol", "z^3"]),
        (
            "toeplitz-index",
            vec!["toeplitz-index", "--symbol", "z^2", "--scales", "8,16,24"],
        ),
        ("chern", vec!["chern", "--u", "z^1", "--n", "1"]),
        ("schur", vec!["schur", "--n", "3", "--trials", "4"]),
        (
            "group-index",
            vec!["group-index", "--group", "Z", "--element", "-3", "--radii", "3,4,5"],
        ),
        (
            "group-index",
            vec!["group-index", "--group", "B3", "--element", "s1^2", "--radii", "2,3,4"],
        ),
        (
            "snumbers",
            vec!["snumbers", "--matrix", csv.to_str().unwrap(), "--p", "inf"],
        ),
        (
            "snumbers",
            vec!["snumbers", "--matrix", json.to_str().unwrap(), "--p", "2", "--q", "0.5"],
        ),
        (
            "free-hilbert",
            vec!["free-hilbert", "--signs", "+-,-+", "--t", "g1 g2", "--radius", "2"],
        ),
        (
            "free-hilbert",
            vec!["free-hilbert", "--random-signs", "3", "--t", "g3^-1", "--radius", "2"],
        ),
        ("selftest", vec!["selftest"]),
    ];
    for (command, args) in cases {
        let r = run(&args);
        let doc = assert_valid(command, &r.text);
        assert_eq!(doc["command"], command);
    }
}

#[test]
fn schemas_reject_tampered_documents() {
    let mut doc: Value = serde_json::from_str(&run(&["toeplitz-index", "--symbol", "z"]).text).unwrap();
    assert!(schema("toeplitz-index").is_valid(&doc));
    doc["result"]["index"] = "unsettled".into();
    assert!(!schema("toeplitz-index").is_valid(&doc));
    let mut doc: Value = serde_json::from_str(&run(&["selftest"]).text).unwrap();
    doc["surprise"] = 1.into();
    assert!(!schema("selftest").is_valid(&doc));
    doc.as_object_mut().unwrap().remove("surprise");
    doc["schema_version"] = 2.into();
    assert!(!schema("selftest").is_valid(&doc));
}

#[test]
fn documented_examples() {
    let doc: Value = serde_json::from_str(&run(&["toeplitz-index", "--symbol", "z^3"]).text).unwrap();
    assert_eq!(doc["result"]["index"], -3);
    assert_eq!(doc["result"]["agree"], true);
    let doc: Value = serde_json::from_str(&run(&["toeplitz-index", "--symbol", "1"]).text).unwrap();
    assert_eq!(doc["result"]["index"], 0);
    let doc: Value = serde_json::from_str(&run(&["toeplitz-index", "--symbol", "z^-1+0.1"]).text).unwrap();
    assert_eq!(doc["result"]["index"], 1);
    let doc: Value = serde_json::from_str(&run(&["chern", "--u", "z^1", "--n", "1"]).text).unwrap();
    assert_eq!(doc["result"]["evaluation"]["nearest_integer"], -1);
    assert_eq!(doc["result"]["evaluation"]["raw_trace"][0], 4.0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["schur", "--n", "4", "--trials", "6", "--seed", "11"],
        vec!["free-hilbert", "--random-signs", "2", "--t", "g1", "--seed", "3"],
        vec!["toeplitz-index", "--symbol", "2 + z - 0.5*z^-2"],
    ] {
        assert_eq!(run(&args).text, run(&args).text);
    }
}

#[test]
fn config_file_is_merged_and_checked() {
    let cfg = temp_file("ok.json", r#"{"format": "csv", "seed": 9}"#);
    let r = run(&["schur", "--n", "3", "--trials", "2", "--config", cfg.to_str().unwrap()]);
    assert!(r.text.starts_with("trial,n,condition"));
    let r = run(&[
        "schur",
        "--n",
        "3",
        "--trials",
        "2",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_str(&r.text).unwrap();
    assert_eq!(doc["settings"]["seed"], 9);
    let bad = temp_file("bad.json", r#"{"format": "csv", "colour": "red"}"#);
    assert!(run_args(["fredholm-lab", "selftest", "--config", bad.to_str().unwrap()]).is_err());
}

#[test]
fn csv_quotes_fields_with_commas() {
    let r = run(&["selftest", "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(r.text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["check", "passed", "detail"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.len() == 3));
    assert!(r.text.contains('"'), "details containing commas must be quoted");
}

fn binary(args: &[&str], threads: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fredholm-lab"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("FREDHOLM_LAB_THREADS", t),
        None => cmd.env_remove("FREDHOLM_LAB_THREADS"),
    };
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn exit_codes_follow_error_classes() {
    assert_eq!(binary(&["toeplitz-index", "--symbol", "z^3"], None).0, 0);
    assert_eq!(binary(&["selftest"], Some("2")).0, 0);
    // bad input
    assert_eq!(binary(&["toeplitz-index", "--symbol", "z^^2"], None).0, 2);
    assert_eq!(binary(&["group-index", "--group", "F2", "--element", "g1"], None).0, 2);
    assert_eq!(binary(&["chern", "--u", "z", "--n", "2"], None).0, 2);
    assert_eq!(binary(&["selftest"], Some("zero")).0, 2);
    assert_eq!(binary(&["schur"], None).0, 2);
    // non-stabilizing
    assert_eq!(
        binary(
            &["group-index", "--group", "B3", "--element", "s1", "--radii", "2,3,4"],
            None
        )
        .0,
        3
    );
    // numerical refusal: 1 + z vanishes at z = -1
    assert_eq!(binary(&["toeplitz-index", "--symbol", "1+z"], None).0, 4);
    // disagreement with an expected value
    assert_eq!(
        binary(
            &["group-index", "--group", "Z", "--element", "2", "--expect", "2"],
            None
        )
        .0,
        1
    );
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["schur", "--n", "5", "--trials", "8", "--seed", "4"];
    let (_, one) = binary(&args, Some("1"));
    let (_, four) = binary(&args, Some("4"));
    assert_eq!(one, four);
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("fredholm-lab-out-{}.json", std::process::id()));
    let (code, stdout) = binary(&["chern", "--u", "z^2", "--output", path.to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_valid("chern", &std::fs::read_to_string(&path).unwrap());
}
