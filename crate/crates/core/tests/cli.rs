use std::process::Command;

use tt_flock::experiments::{write_series, ExperimentConfig, TimeSeriesRecord};

fn ttflock(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ttflock"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn config_roundtrips_through_toml() {
    let mut c = ExperimentConfig::default();
    c.grid.n = 48;
    c.diagnostics.l = vec![0.0, 0.5, 1.0];
    let back = ExperimentConfig::from_toml_str(&c.to_toml_string(), &[]).unwrap();
    assert_eq!(back, c);
}

#[test]
fn overrides_and_violations() {
    let c = ExperimentConfig::from_toml_str("", &["grid.n=32".into(), "model.kind=\"tt\"".into()])
        .unwrap();
    assert_eq!(c.grid.n, 32);
    assert!(ExperimentConfig::from_toml_str("[grid]\nd = 4\n", &[]).is_err());
    assert!(ExperimentConfig::from_toml_str("[grid]\nbogus = 1\n", &[]).is_err());
}

#[test]
fn oracle_passes() {
    let (code, out) = ttflock(&["oracle"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("\"pass\": true"));
}

#[test]
fn steady_check_passes() {
    let (code, _) = ttflock(&[
        "steady-check",
        "--override",
        "grid.n=16",
        "--override",
        "checks.steady_steps=50",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn config_errors_exit_with_one() {
    assert_eq!(ttflock(&["simulate", "--override", "grid.n=7"]).0, 1);
    assert_eq!(
        ttflock(&["simulate", "--config", "/nonexistent/cfg.toml"]).0,
        3
    );
}

#[test]
fn singular_solve_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let code = ttflock(&[
        "simulate",
        "--output",
        dir.path().to_str().unwrap(),
        "--override",
        "model.form=\"primitive\"",
        "--override",
        "model.alpha=2.0",
        "--override",
        "stepper.scheme=\"imex-euler\"",
        "--override",
        "stepper.dt=0.5",
        "--override",
        "grid.n=16",
    ])
    .0;
    assert_eq!(code, 2);
}

#[test]
fn fit_decay_reports_io_and_acceptance_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(ttflock(&["fit-decay", "--output", d]).0, 3);

    // Values that do not decay fail the one-sided check.
    let recs: Vec<TimeSeriesRecord> = (0..=100)
        .map(|i| TimeSeriesRecord {
            t: i as f64,
            h3: 1.0,
            hm: 1.0,
            hdot_minus_s: 1.0,
            hdot_l: vec![1.0, 1.0],
            ubar_l2: 0.0,
            hypo: 1.0,
            envelope: vec![1.0, 1.0],
            mean_eta: 0.0,
            ledger: Default::default(),
        })
        .collect();
    write_series(
        &dir.path().join("series.jsonl"),
        &serde_json::json!({}),
        &recs,
    )
    .unwrap();
    assert_eq!(ttflock(&["fit-decay", "--output", d]).0, 4);
}

#[test]
fn simulate_writes_series_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = ttflock(&[
        "simulate",
        "--seed",
        "7",
        "--output",
        dir.path().to_str().unwrap(),
        "--override",
        "grid.n=16",
        "--override",
        "stepper.t_end=0.5",
    ]);
    assert_eq!(code, 0);
    assert!(dir.path().join("series.jsonl").exists());
    assert!(dir.path().join("final.ttlb").exists());
}

#[test]
fn verify_inequalities_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = ttflock(&[
        "verify-inequalities",
        "--output",
        dir.path().to_str().unwrap(),
        "--override",
        "lab.trials=50",
        "--override",
        "lab.n=16",
        "--override",
        "lab.cutoff=6",
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("inequalities.jsonl")).unwrap();
    assert!(text.lines().count() >= 3);
}
