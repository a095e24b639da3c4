//! End-to-end behavior of the binary: exit codes, output formats, file
//! ingestion round-trips, determinism, and the --out contract.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use entroqec::codes::{leung4, repetition3};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entroqec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn tmp_path(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).expect("tmp dir");
    dir.join(name)
}

#[test]
fn exit_codes_cover_pass_fail_and_usage() {
    assert_eq!(run(&["reproduce"]).status.code(), Some(0));

    let forced = run(&["reproduce", "--tolerance", "helstrom=1e-30", "--format", "json"]);
    assert_eq!(forced.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&forced)).unwrap();
    assert_eq!(doc["all_pass"], serde_json::Value::Bool(false));
    let helstrom = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "helstrom")
        .unwrap();
    assert_eq!(helstrom["pass"], serde_json::Value::Bool(false));

    for bad in [
        vec!["reproduce", "--tolerance", "nonsense=1"],
        vec!["reproduce", "--tolerance", "helstrom"],
        vec!["cycle", "--noise", "warp:0.1"],
        vec!["cycle", "--noise", "bitflip:lots"],
        vec!["cycle", "--code", "leung4", "--noise", "bitflip:0.1"],
        vec!["discriminate"],
        vec!["discriminate", "--c1", "1.5"],
        vec!["sweep", "--grid", "0:0.5"],
        vec!["kl", "--order", "9"],
        vec!["definitely-not-a-command"],
    ] {
        let out = run(&bad);
        assert_eq!(
            out.status.code(),
            Some(2),
            "expected exit 2 for {bad:?}, stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn reproduce_json_names_every_check_with_units() {
    let out = run(&["reproduce", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 14);
    for check in checks {
        assert!(!check["name"].as_str().unwrap().is_empty());
        assert!(!check["unit"].as_str().unwrap().is_empty());
        assert!(check["expected"].is_number());
        assert!(check["computed"].is_number());
        assert!(check["tolerance"].is_number());
        assert_eq!(check["pass"], serde_json::Value::Bool(true));
    }
}

#[test]
fn code_files_round_trip_through_every_command() {
    let rep_path = tmp_path("repetition3.json");
    fs::write(&rep_path, serde_json::to_string(&repetition3()).unwrap()).unwrap();
    let leung_path = tmp_path("leung4.json");
    fs::write(&leung_path, serde_json::to_string(&leung4()).unwrap()).unwrap();
    let rep = rep_path.to_str().unwrap();
    let leung = leung_path.to_str().unwrap();

    for (builtin, file, rest) in [
        ("repetition3", rep, vec!["--noise", "bitflip:0.1", "--restricted"]),
        ("leung4", leung, vec!["--noise", "ad:0.05"]),
    ] {
        let mut base_args = vec!["cycle", "--format", "json", "--code", builtin];
        base_args.extend(&rest);
        let mut file_args = vec!["cycle", "--format", "json", "--code", file];
        file_args.extend(&rest);
        let a = run(&base_args);
        let b = run(&file_args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "cycle differs for {builtin} vs file");
    }

    let a = run(&["kl", "--format", "json", "--code", "repetition3", "--restricted"]);
    let b = run(&["kl", "--format", "json", "--code", rep, "--restricted"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "kl differs for builtin vs file");

    let a = run(&[
        "kl", "--format", "json", "--code", "leung4", "--channel", "ad:0.1", "--order", "1",
    ]);
    let b = run(&[
        "kl", "--format", "json", "--code", leung, "--channel", "ad:0.1", "--order", "1",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "kl --order differs for builtin vs file");

    // A file that is not a valid code is rejected as a config error.
    let bad_path = tmp_path("bad_code.json");
    fs::write(&bad_path, "{\"n_qubits\": 2}").unwrap();
    let bad = run(&["cycle", "--code", bad_path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn kl_reports_the_leading_coefficient() {
    let out = run(&[
        "kl", "--code", "leung4", "--channel", "ad:0.1", "--order", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["truncation_order"], serde_json::json!(1));
    let a00 = doc["alpha"]["data"][0][0].as_f64().unwrap();
    assert!((a00 - 0.8).abs() <= 1e-6, "alpha[0][0] = {a00}");
    // The (0,0) residual block carries the expected diagonal.
    let b00 = doc["b_hat"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["j"] == serde_json::json!(0) && e["k"] == serde_json::json!(0))
        .unwrap();
    let d0 = b00["block"]["data"][0][0].as_f64().unwrap();
    let d1 = b00["block"]["data"][3][0].as_f64().unwrap();
    assert!((d0 - 0.02805).abs() <= 1e-6, "b00 entry {d0}");
    assert!((d1 - 0.01).abs() <= 1e-6, "b11 entry {d1}");
}

#[test]
fn sweep_csv_has_the_documented_columns() {
    let out = run(&["sweep", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("parameter,entropy_bits,entropy_nats,fidelity")
    );
    assert_eq!(lines.count(), 501);

    // Every row is four '.'-decimal numbers; no locale formatting anywhere.
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        for field in fields {
            field.parse::<f64>().expect("numeric field");
            assert!(!field.contains(' '));
        }
    }
}

#[test]
fn out_flag_replaces_the_file_atomically() {
    let path = tmp_path("report.json");
    fs::write(&path, "stale contents").unwrap();

    let direct = run(&["reproduce", "--format", "json"]);
    let written = run(&[
        "reproduce",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(written.status.code(), Some(0));
    assert!(stdout(&written).is_empty(), "--out suppresses stdout");
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&direct));
    assert!(
        !path.with_file_name("report.json.partial").exists(),
        "temp file cleaned up"
    );
}

#[test]
fn restricted_cycle_reports_a_nonnegative_total() {
    let out = run(&["cycle", "--restricted", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["log_base"], serde_json::json!("two"));
    assert_eq!(doc["verdicts"]["ΔS_tot≥0"], serde_json::Value::Bool(true));
    assert!(doc["delta_s_tot"].as_f64().unwrap() >= -1e-10);
    assert!(doc["fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
}

#[test]
fn base_flag_rescales_the_ledger() {
    let bits = run(&["cycle", "--restricted", "--format", "json"]);
    let nats = run(&["cycle", "--restricted", "--format", "json", "--base", "e"]);
    let b: serde_json::Value = serde_json::from_str(&stdout(&bits)).unwrap();
    let n: serde_json::Value = serde_json::from_str(&stdout(&nats)).unwrap();
    assert_eq!(n["log_base"], serde_json::json!("e"));
    let b_cost = b["erasure_cost"].as_f64().unwrap();
    let n_cost = n["erasure_cost"].as_f64().unwrap();
    assert!((n_cost - b_cost * 2.0_f64.ln()).abs() <= 1e-12);
}

#[test]
fn cycle_json_is_deterministic() {
    let a = run(&["cycle", "--code", "leung4", "--noise", "ad:0.05", "--format", "json"]);
    let b = run(&["cycle", "--code", "leung4", "--noise", "ad:0.05", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
