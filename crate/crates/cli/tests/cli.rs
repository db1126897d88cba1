//! End-to-end tests of the command-line surface: exit codes, strict config
//! parsing, flag precedence, artifact layout, and byte-identical reruns.

use std::path::Path;
use std::process::Command;

use orbitconv::report::{Bound, VerificationReport};
use orbitconv_cli::run;

fn s(args: &[&str]) -> Vec<String> {
    args.iter().map(|a| a.to_string()).collect()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&s(&["bogus-subcommand"])), 2);
    assert_eq!(run(&s(&["verify"])), 2); // no scenario anywhere
    assert_eq!(run(&s(&["verify", "no-such-scenario"])), 2);
    assert_eq!(run(&s(&["orbit", "--action", "X9", "--point", "1,0"])), 2);
    assert_eq!(run(&s(&["orbit", "--action", "S3", "--point", "1,x"])), 2);
    // radial bounds out of order: precondition failure, not a verdict
    assert_eq!(
        run(&s(&["detect", "--action", "O2", "--set", "radial:2,1"])),
        2
    );
    assert_eq!(run(&s(&["detect", "--action", "O2", "--set", "blob:1"])), 2);
    assert_eq!(run(&s(&["verify", "schur-horn", "--jobs", "0"])), 2);
    assert_eq!(run(&s(&["--help"])), 0);
}

#[test]
fn config_file_is_strictly_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");

    std::fs::write(&cfg, r#"{"scenario": "schur-horn", "wall_clock": 1}"#).unwrap();
    assert_eq!(run(&s(&["verify", "--config", cfg.to_str().unwrap()])), 2);

    std::fs::write(
        &cfg,
        r#"{"scenario": "schur-horn", "params": {"speed": 9}}"#,
    )
    .unwrap();
    assert_eq!(run(&s(&["verify", "--config", cfg.to_str().unwrap()])), 2);

    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(run(&s(&["verify", "--config", cfg.to_str().unwrap()])), 2);

    assert_eq!(run(&s(&["verify", "--config", "/nonexistent/run.json"])), 2);
}

#[test]
fn verify_writes_report_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    let code = run(&s(&[
        "verify",
        "finite-counterexample",
        "--group",
        "C5",
        "--seed",
        "17",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0); // the counterexample verifies: all metrics pass

    let report_path = out.join("finite-counterexample-seed17-report.json");
    let report: VerificationReport = serde_json::from_str(&read(&report_path)).unwrap();
    assert_eq!(report.seed, 17);
    assert_eq!(report.verdict.as_deref(), Some("nonconvex-witness"));
    let cfg = report.config.expect("merged config echoed");
    assert_eq!(cfg["group"], "C5");
    assert_eq!(cfg["seed"], 17);

    // every artifact listed in the report exists, names embed scenario + seed
    assert!(!report.artifacts.is_empty());
    for a in &report.artifacts {
        assert!(a.contains("finite-counterexample-seed17"), "{a}");
        assert!(Path::new(a).exists(), "{a}");
    }
    let metrics = read(&out.join("finite-counterexample-seed17-metrics.csv"));
    assert!(metrics.contains("certificate_margin"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"scenario": "finite-counterexample", "seed": 7, "params": {"group": "neg2", "pair_budget": 30}}"#,
    )
    .unwrap();
    let code = run(&s(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let report: VerificationReport =
        serde_json::from_str(&read(&out.join("finite-counterexample-seed11-report.json"))).unwrap();
    assert_eq!(report.seed, 11, "flag beats config seed");
    let echoed = report.config.unwrap();
    assert_eq!(echoed["group"], "neg2", "config beats scenario default");
    assert_eq!(echoed["pair_budget"], 30);
}

#[test]
fn detect_exit_code_tracks_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let shell = run(&s(&[
        "detect",
        "--action",
        "O2",
        "--set",
        "radial:1,1",
        "--probes",
        "30",
        "--pairs",
        "40",
        "--out",
        &out,
    ]));
    assert_eq!(shell, 1, "unit circle preimage is nonconvex");
    let report: VerificationReport =
        serde_json::from_str(&read(&dir.path().join("detect-seed271828-report.json"))).unwrap();
    assert_eq!(report.verdict.as_deref(), Some("nonconvex-witness"));
    assert!(dir.path().join("detect-seed271828-witness.csv").exists());
    assert!(dir.path().join("detect-seed271828-slopes.csv").exists());

    let ball = run(&s(&[
        "detect",
        "--action",
        "O2",
        "--set",
        "radial:0,1",
        "--probes",
        "30",
        "--pairs",
        "40",
        "--out",
        &out,
    ]));
    assert_eq!(ball, 0, "ball preimage is convex");
}

#[test]
fn orbit_and_slope_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    assert_eq!(
        run(&s(&[
            "orbit", "--action", "S3", "--point", "1,2,3", "--out", &out
        ])),
        0
    );
    let pts = read(&dir.path().join("orbit-seed271828-points.csv"));
    assert_eq!(pts.lines().count(), 7, "header + all six permutations");
    assert_eq!(pts.lines().next().unwrap(), "x0,x1,x2");

    assert_eq!(
        run(&s(&[
            "slope",
            "--action",
            "O2",
            "--set",
            "radial:0,1",
            "--point",
            "1.5,0",
            "--out",
            &out,
        ])),
        0
    );
    let table = read(&dir.path().join("slope-seed271828-table.csv"));
    assert_eq!(table.lines().count(), 4, "header + one row per radius");
    assert!(table.starts_with("probe,x0,x1,radius,per_radius_sup,raw,clamped"));

    // probe inside the set: no slope is defined there
    assert_eq!(
        run(&s(&[
            "slope",
            "--action",
            "O2",
            "--set",
            "radial:0,1",
            "--point",
            "0.5,0",
            "--out",
            &out,
        ])),
        2
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let args = s(&[
        "verify",
        "finite-counterexample",
        "--group",
        "C5",
        "--out",
        &out,
    ]);
    assert_eq!(run(&args), 0);
    let report_path = dir
        .path()
        .join("finite-counterexample-seed271828-report.json");
    let metrics_path = dir
        .path()
        .join("finite-counterexample-seed271828-metrics.csv");
    let first = (read(&report_path), read(&metrics_path));
    assert_eq!(run(&args), 0);
    assert_eq!(first.0, read(&report_path));
    assert_eq!(first.1, read(&metrics_path));
}

#[test]
fn report_merges_and_gates_on_status() {
    let dir = tempfile::tempdir().unwrap();
    let pass_path = dir.path().join("pass.json");
    let fail_path = dir.path().join("fail.json");

    let mut pass = VerificationReport::new("demo-pass", 3);
    pass.metric("gap", 0.1, Bound::AtMost(1.0));
    pass.finalize(false);
    pass.write_json(&pass_path).unwrap();

    let mut fail = VerificationReport::new("demo-fail", 4);
    fail.metric("gap", 2.0, Bound::AtMost(1.0));
    fail.finalize(false);
    fail.write_json(&fail_path).unwrap();

    let summary = dir.path().join("summary.csv");
    let code = run(&s(&[
        "report",
        pass_path.to_str().unwrap(),
        fail_path.to_str().unwrap(),
        "--out",
        summary.to_str().unwrap(),
    ]));
    assert_eq!(code, 1, "one non-pass report gates the merge");
    let table = read(&summary);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "scenario_id,seed,status,verdict,failing_metrics");
    assert_eq!(lines[1], "demo-pass,3,pass,,");
    assert_eq!(lines[2], "demo-fail,4,fail,,gap");

    let code = run(&s(&["report", pass_path.to_str().unwrap()]));
    assert_eq!(code, 0);

    assert_eq!(run(&s(&["report", "/nonexistent.json"])), 2);
}

#[test]
fn env_var_supplies_output_dir_and_stdout_is_deterministic() {
    let bin = env!("CARGO_BIN_EXE_orbitconv");
    let dir = tempfile::tempdir().unwrap();
    let invoke = || {
        Command::new(bin)
            .args(["verify", "finite-counterexample", "--group", "neg2"])
            .env(orbitconv_cli::OUT_DIR_ENV, dir.path())
            .output()
            .unwrap()
    };
    let first = invoke();
    assert!(first.status.success());
    assert!(
        dir.path()
            .join("finite-counterexample-seed271828-report.json")
            .exists(),
        "artifacts land in the env-var directory"
    );
    let second = invoke();
    assert_eq!(first.stdout, second.stdout, "stdout is reproducible");

    // an explicit --out beats the environment
    let sub = dir.path().join("explicit");
    let out = Command::new(bin)
        .args(["verify", "finite-counterexample", "--group", "neg2"])
        .args(["--out", sub.to_str().unwrap()])
        .env(orbitconv_cli::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(sub
        .join("finite-counterexample-seed271828-report.json")
        .exists());
}

#[test]
fn failed_scenario_names_the_metric() {
    let bin = env!("CARGO_BIN_EXE_orbitconv");
    let dir = tempfile::tempdir().unwrap();
    // a fixed point of the S3 action has a single-point orbit: degenerate seed
    let out = Command::new(bin)
        .args(["verify", "finite-counterexample", "--group", "S3"])
        .args(["--point", "1,1,1"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("orbit_size"), "stderr was: {stderr}");
}
