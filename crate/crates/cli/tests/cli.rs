//! End-to-end tests against the compiled binary: exit codes, file outputs,
//! JSON report contents and determinism of reruns.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ddes");
const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/fixtures/two_neuron_periodic.toml"
);

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should run")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// The bundled model with the second-row weights doubled: the comparison
/// matrix picks up a negative trailing minor, so no certificate exists.
fn uncertified_model() -> String {
    let base = include_str!("../../core/fixtures/two_neuron_periodic.toml");
    let out = base
        .replace(
            "i = 2\nj = 1\nk = 1\nkind = \"cos\"\namplitude = \"1/4\"",
            "i = 2\nj = 1\nk = 1\nkind = \"cos\"\namplitude = \"1/2\"",
        )
        .replace("amplitude = \"-1/6\"", "amplitude = \"-1/3\"")
        .replace(
            "i = 2\nj = 1\nk = 2\nkind = \"sin\"\namplitude = \"1/4\"",
            "i = 2\nj = 1\nk = 2\nkind = \"sin\"\namplitude = \"1/2\"",
        )
        .replace("amplitude = \"-5/12\"", "amplitude = \"-5/6\"");
    assert_ne!(out, base, "variant edits should apply");
    out
}

#[test]
fn certify_reports_exact_fractions() {
    let dir = tmp("certify_json");
    let out = run(&[
        "certify",
        "--model",
        FIXTURE,
        "--out",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let text = stdout(&out);
    let end = text.rfind('}').expect("stdout carries a JSON object");
    let report: Value = serde_json::from_str(&text[..=end]).expect("stdout is JSON");
    assert!(
        text[end..].contains("certificate:"),
        "stdout should name the written file: {text}"
    );
    assert_eq!(report["verdict"], "certified");
    assert_eq!(report["route"], "rescaled");
    let test = &report["m_matrix_test"];
    assert_eq!(test["leading_minors"], serde_json::json!(["1/2", "1/12"]));
    assert_eq!(test["witness"], serde_json::json!(["6", "12"]));
    assert_eq!(report["margins"], serde_json::json!(["1/6", "1/12"]));
    assert!(report["decay"]["lambda_bound"].as_f64().unwrap() < 1.0);
    assert!(report["lambda"]["within_bound"].as_bool().unwrap());

    let file = json(&dir.join("certificate.json"));
    assert_eq!(file, report, "file and stdout reports should agree");
}

#[test]
fn uncertified_model_exits_one() {
    let dir = tmp("uncertified");
    let model = dir.join("model.toml");
    fs::write(&model, uncertified_model()).unwrap();
    let out = run(&[
        "certify",
        "--model",
        model.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out).contains("not-certified"),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn periodic_guard_refuses_without_force() {
    let dir = tmp("guard");
    let model = dir.join("model.toml");
    fs::write(&model, uncertified_model()).unwrap();
    let model = model.to_str().unwrap();

    let out = run(&["periodic", "--model", model, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let msg = stderr(&out);
    assert!(msg.contains("not certified"), "stderr: {msg}");
    assert!(msg.contains("--force"), "stderr: {msg}");
    assert!(
        !dir.join("orbit.csv").exists(),
        "refusal should write nothing"
    );

    let forced = run(&[
        "periodic",
        "--model",
        model,
        "--force",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&forced), 0, "stderr: {}", stderr(&forced));
    assert!(dir.join("orbit.csv").exists());
}

#[test]
fn invalid_model_exits_two_with_location() {
    let dir = tmp("invalid");
    let model = dir.join("model.toml");
    fs::write(&model, "format_version = [1,").unwrap();
    let out = run(&["certify", "--model", model.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.starts_with("error:"), "stderr: {msg}");
    assert!(msg.contains("line 1"), "stderr: {msg}");

    let missing = run(&[
        "certify",
        "--model",
        dir.join("nope.toml").to_str().unwrap(),
    ]);
    assert_eq!(code(&missing), 2);

    fs::write(&model, "").unwrap();
    let empty = run(&["certify", "--model", model.to_str().unwrap()]);
    assert_eq!(code(&empty), 2);
}

#[test]
fn simulate_writes_versioned_csv() {
    let dir = tmp("simulate");
    let out = run(&[
        "simulate",
        "--model",
        FIXTURE,
        "--horizon",
        "50",
        "--seed",
        "cos,sin",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let text = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# format_version: 1"));
    assert_eq!(lines.next(), Some("m,x1,x2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 54, "window -3..=50 should give 54 rows");
    assert!(rows[0].starts_with("-3,"));
    assert!(rows[53].starts_with("50,"));
}

#[test]
fn bad_seed_exits_two() {
    let out = run(&[
        "simulate",
        "--model",
        FIXTURE,
        "--horizon",
        "10",
        "--seed",
        "bogus,sin",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("seed"), "stderr: {}", stderr(&out));
}

#[test]
fn orbit_csv_reseeds_periodic() {
    let first = tmp("orbit_a");
    let out = run(&[
        "periodic",
        "--model",
        FIXTURE,
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = json(&first.join("periodic.json"));
    assert!(report["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["period"], 10);

    let second = tmp("orbit_b");
    let reseeded = run(&[
        "periodic",
        "--model",
        FIXTURE,
        "--seed-csv",
        first.join("orbit.csv").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code(&reseeded), 0, "stderr: {}", stderr(&reseeded));
    let report = json(&second.join("periodic.json"));
    assert!(
        report["iterations"].as_u64().unwrap() <= 2,
        "starting on the orbit should converge immediately: {report}"
    );
}

#[test]
fn verify_bounds_passes_on_fixture() {
    let dir = tmp("verify");
    let out = run(&[
        "verify-bounds",
        "--model",
        FIXTURE,
        "--pairs",
        "3",
        "--horizon",
        "200",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(
        stdout(&out).contains("verification: pass"),
        "stdout: {}",
        stdout(&out)
    );

    let report = json(&dir.join("verify.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(report["envelope"]["pass"], true);
    assert_eq!(report["lemma"]["pass"], true);
    assert!(dir.join("bounds.csv").exists());
    assert!(dir.join("lemma.csv").exists());
}

#[test]
fn example_pipeline_is_deterministic() {
    let first = tmp("example_a");
    let out = run(&["example", "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let second = tmp("example_b");
    let rerun = run(&["example", "--out", second.to_str().unwrap()]);
    assert_eq!(code(&rerun), 0, "stderr: {}", stderr(&rerun));

    let mut names: Vec<String> = fs::read_dir(&first)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(
        names.contains(&"certificate.json".to_string())
            && names.contains(&"orbit.csv".to_string())
            && names.contains(&"convergence_1.csv".to_string())
            && names.contains(&"verify.json".to_string()),
        "unexpected file set: {names:?}"
    );
    for name in &names {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}
