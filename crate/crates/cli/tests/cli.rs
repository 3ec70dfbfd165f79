use std::process::{Command, Output};

use serde_json::Value;
use zeno_cli::output::format_float;
use zeno_core::pipeline::effective_lifetime;
use zeno_core::response_first::QubitFieldParams;

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn continuous_limit_curve_matches_classical_csv() {
    let (e, a, sigma) = (-1.0, 1.0, 0.01);
    let tau = effective_lifetime(QubitFieldParams::new(e, sigma).unwrap(), a).unwrap();
    let limit = zeno(&[
        "zeno-curve",
        "--E",
        "-1",
        "--a",
        "1",
        "--sigma",
        "0.01",
        "--T",
        "40",
        "--N",
        "inf",
    ]);
    let classical = zeno(&["classical", "--tau-E", &format_float(tau), "--T", "40"]);
    assert!(limit.status.success() && classical.status.success());
    assert_eq!(stdout(&limit), stdout(&classical));
}

#[test]
fn curve_csv_layout() {
    let o = zeno(&["classical", "--tau-E", "1", "--T", "2", "--points", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.split("\r\n").collect();
    assert_eq!(lines[0], "time,survival");
    assert_eq!(lines[1], "0.0,1.0");
    assert_eq!(lines[2], format!("1.0,{}", format_float((-1.0f64).exp())));
    assert_eq!(lines.len(), 5, "three rows plus header and trailing terminator");
}

#[test]
fn json_document_shape() {
    let o = zeno(&[
        "zeno-gaussian",
        "--tau-z",
        "1",
        "--N",
        "4",
        "--T",
        "1",
        "--points",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.trim_start().starts_with("{\n  \"meta\""), "meta block comes first");
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["command"], "zeno-gaussian");
    assert_eq!(doc["meta"]["params"]["N"], 4);
    let data = doc["data"].as_array().unwrap();
    assert_eq!(data.len(), 2);
    assert_eq!(data[1]["time"], 1.0);
    let product = (1.0f64 - 1.0 / 16.0).powi(4);
    assert!((data[1]["survival"].as_f64().unwrap() - product).abs() < 1e-15);
    assert_eq!(data[1]["gaussian_limit"], (-0.25f64).exp());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# classical run\ntau_E = 5\nT = 2\npoints = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = zeno(&["classical", "--config", cfg]);
    let direct = zeno(&["classical", "--tau-E", "5", "--T", "2", "--points", "3"]);
    assert_eq!(stdout(&from_file), stdout(&direct));

    let overridden = zeno(&["classical", "--config", cfg, "--tau-E", "1"]);
    let direct = zeno(&["classical", "--tau-E", "1", "--T", "2", "--points", "3"]);
    assert_eq!(stdout(&overridden), stdout(&direct));
}

#[test]
fn output_flag_writes_file_and_leaves_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let o = zeno(&[
        "classical",
        "--tau-E",
        "1",
        "--T",
        "1",
        "--points",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("time,survival\r\n"));
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = red\n").unwrap();

    let cases: [&[&str]; 6] = [
        &["classical", "--T", "1"],
        &["classical", "--tau-E", "1", "--T", "1", "--sigma", "0.1"],
        &["classical", "--tau-E", "one", "--T", "1"],
        &[
            "classical",
            "--config",
            bad.to_str().unwrap(),
            "--tau-E",
            "1",
            "--T",
            "1",
        ],
        &["no-such-command"],
        &[],
    ];
    for args in cases {
        let o = zeno(args);
        assert_eq!(
            o.status.code(),
            Some(64),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(o.stdout.is_empty());
    }
    assert_eq!(zeno(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_of_domain_values_are_rejected_before_running() {
    let o = zeno(&["classical", "--tau-E", "-1", "--T", "1"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("--tau-E must be positive"));
}

#[test]
fn landau_peierls_mode_reports_the_gap() {
    let args = [
        "zeno-curve",
        "--E",
        "-5",
        "--a",
        "1",
        "--sigma",
        "0.01",
        "--T",
        "10",
        "--N",
        "inf",
    ];
    let o = zeno(&[&args[..], &["--landau-peierls", "--format", "json"]].concat());
    assert_eq!(o.status.code(), Some(0));
    let note = String::from_utf8(o.stderr).unwrap();
    assert!(note.contains("N capped at 49 (bound 49)"), "{note}");
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let lp = &doc["meta"]["landau_peierls"];
    assert_eq!(lp["max_n"], 49);
    let diff = lp["max_abs_diff_vs_limit"].as_f64().unwrap();
    assert!(diff > 0.0 && diff < 1e-2, "{diff}");

    let capped = zeno(&[&args[..9], &["--N", "10", "--landau-peierls"]].concat());
    assert!(String::from_utf8(capped.stderr)
        .unwrap()
        .contains("N capped at 10 (bound 49)"));

    let none = zeno(&[
        "zeno-curve",
        "--E",
        "-0.1",
        "--a",
        "1",
        "--sigma",
        "0.01",
        "--T",
        "5",
        "--N",
        "inf",
        "--landau-peierls",
    ]);
    assert_eq!(none.status.code(), Some(1));
}

#[test]
fn verify_exit_status_tracks_flags() {
    let flagged = zeno(&["verify"]);
    assert_eq!(flagged.status.code(), Some(2));
    let text = stdout(&flagged);
    assert!(text.starts_with("formula_id,paper_anchor,closed_form,oracle,abs_diff,tolerance,verdict\r\n"));
    assert!(String::from_utf8(flagged.stderr).unwrap().contains("FLAG"));
    assert_eq!(zeno(&["verify", "--allow-flags"]).status.code(), Some(0));
}

#[test]
fn response_first_perturbative_warning() {
    let broken = zeno(&["response-first", "--E", "-1", "--delta-tau", "50", "--sigma", "0.5"]);
    assert_eq!(broken.status.code(), Some(1));
    let o = zeno(&["response-first", "--E", "-1", "--delta-tau", "50", "--sigma", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stderr).unwrap().contains("perturbative"));
    let quiet = zeno(&["response-first", "--E", "-1", "--delta-tau", "1", "--sigma", "0.01"]);
    assert!(quiet.stderr.is_empty());
}
