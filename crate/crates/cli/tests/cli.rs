//! End-to-end runs of the compiled binary: generation, solving, bounding,
//! document round trips, and the documented exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_guesswork"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

fn gen_instance(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let path_str = path.to_str().unwrap().to_string();
    let mut args = vec!["gen", name, "--output", &path_str];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "gen failed: {:?}", out);
    path
}

const BB84_VALUE: f64 = 1.7094305849579052;
const TRINE_VALUE: f64 = 1.4226497308103742;

#[test]
fn solve_bb84_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "bb84", &[]);
    let out = run(&[
        "solve",
        instance.to_str().unwrap(),
        "--json",
        "--verify",
        "exhaustive",
    ]);
    assert!(out.status.success(), "{out:?}");
    let body = json_of(&out);
    let value = body["value"].as_f64().unwrap();
    assert!((value - BB84_VALUE).abs() < 1e-6, "value {value}");
    assert!(body["verify"]["worst_margin"].as_f64().unwrap() >= -1e-6);
    assert!(body["tolerance"].as_f64().unwrap() > 0.0);
    assert!(body["seed"].is_number());

    // the solution document landed next to the instance and parses
    let solution_file = body["solution_file"].as_str().unwrap();
    let text = std::fs::read_to_string(solution_file).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((doc["value"].as_f64().unwrap() - BB84_VALUE).abs() < 1e-6);
    assert!(!doc["povm"].as_array().unwrap().is_empty());
}

#[test]
fn human_output_prints_nine_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "bb84", &[]);
    let out = run(&["solve", instance.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("1.70943058"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn dual_agrees_with_primal() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "trine", &[]);
    let out = run(&["dual", instance.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let value = json_of(&out)["value"].as_f64().unwrap();
    assert!((value - TRINE_VALUE).abs() < 2e-6, "dual value {value}");
}

#[test]
fn bound_reaches_the_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "trine", &[]);
    let out = run(&[
        "bound",
        instance.to_str().unwrap(),
        "--json",
        "--kappa",
        "4",
        "--seed",
        "7",
        "--restarts",
        "12",
    ]);
    assert!(out.status.success(), "{out:?}");
    let body = json_of(&out);
    let bound = body["upper_bound"].as_f64().unwrap();
    assert!((bound - TRINE_VALUE).abs() < 1e-5, "bound {bound}");
    assert_eq!(body["seed"].as_u64().unwrap(), 7);
}

#[test]
fn certify_ideal_key_scores_two_and_a_half() {
    let dir = tempfile::tempdir().unwrap();
    // an ideal 4-letter key: identical maximally mixed states
    let half = serde_json::json!([[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]);
    let doc = serde_json::json!({
        "schema": 1,
        "letters": ["a", "b", "c", "d"],
        "states": [half, half, half, half],
    });
    let path = dir.path().join("ideal4.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = run(&[
        "certify-key",
        path.to_str().unwrap(),
        "--epsilon",
        "0",
        "--json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let body = json_of(&out);
    assert!((body["lower_bound"].as_f64().unwrap() - 2.5).abs() < 1e-9);
}

#[test]
fn strategy_reconstruction_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "bb84", &[]);
    let strategy_path = dir.path().join("bb84.strategy.json");
    let out = run(&[
        "strategy",
        instance.to_str().unwrap(),
        "--reconstruct-sequential",
        "--output",
        strategy_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let body = json_of(&out);
    let cost = body["expected_cost"].as_f64().unwrap();
    assert!((cost - BB84_VALUE).abs() < 1e-6, "sequential cost {cost}");

    let out = run(&[
        "strategy",
        instance.to_str().unwrap(),
        "--replay",
        strategy_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success(), "{out:?}");
    let replayed = json_of(&out)["expected_cost"].as_f64().unwrap();
    assert!((replayed - cost).abs() < 1e-9);
}

#[test]
fn sweep_has_classical_endpoints_and_quantum_minimum() {
    let out = run(&["sweep", "--family", "bb84", "--points", "9", "--json"]);
    assert!(out.status.success());
    let body = json_of(&out);
    let points = body["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    let first = points[0]["value"].as_f64().unwrap();
    let last = points[8]["value"].as_f64().unwrap();
    let mid = points[4]["value"].as_f64().unwrap();
    assert!((first - 1.75).abs() < 1e-6);
    assert!((last - 1.75).abs() < 1e-6);
    assert!((mid - BB84_VALUE).abs() < 1e-6);
}

#[test]
fn export_misdp_document_structure() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "trine", &[]);
    let misdp = dir.path().join("trine.misdp");
    let out = run(&[
        "export-misdp",
        instance.to_str().unwrap(),
        "--outcomes",
        "4",
        "--output",
        misdp.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(&misdp).unwrap();
    for section in ["MISDP 1", "BLOCKS", "BINARIES", "LINEAR", "OBJECTIVE", "END"] {
        assert!(text.contains(section), "missing {section}");
    }
    assert!(text.contains("mode=exact-value"));
}

#[test]
fn dump_conic_writes_the_interchange_format() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "trine", &[]);
    let dump = dir.path().join("trine.conic");
    let out = run(&[
        "solve",
        instance.to_str().unwrap(),
        "--dump-conic",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("CONIC 1\nSENSE MIN\nBLOCKS 6\n"));
}

#[test]
fn entropic_report_is_json_parseable() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "bb84", &[]);
    let out = run(&["entropic", instance.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{out:?}");
    let body = json_of(&out);
    let lower = body["one_shot_bracket"]["lower"].as_f64().unwrap();
    let upper = body["one_shot_bracket"]["upper"].as_f64().unwrap();
    assert!(lower <= BB84_VALUE && BB84_VALUE <= upper);
    // the sandwiched entropy of the four conjugate states is ln 2
    let h = body["sandwiched_h_half"]["value"].as_f64().unwrap();
    assert!((h - 2f64.ln()).abs() < 1e-8);
}

#[test]
fn exit_code_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    // a state with trace 0.9
    let doc = serde_json::json!({
        "schema": 1,
        "letters": ["a", "b"],
        "states": [
            [[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
            [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        ],
    });
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("trace"), "stderr: {err}");
}

#[test]
fn exit_code_size_cap() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(dir.path(), "tensor2", &["--inner", "bb84"]);
    let out = run(&["solve", instance.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("active-set"));
}

#[test]
fn unknown_example_name_is_a_usage_error() {
    let out = run(&["gen", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let instance = gen_instance(
        dir.path(),
        "random-qutrits",
        &["--n", "3", "--seed", "42"],
    );
    let text = std::fs::read_to_string(&instance).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["letters"].as_array().unwrap().len(), 3);
    // reserialize bit-exactly through the library type
    let out = run(&["solve", instance.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{out:?}");
}
