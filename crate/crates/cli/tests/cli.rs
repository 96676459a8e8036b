use std::path::Path;
use std::process::{Command, Output};

fn bohmlab(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bohmlab")).args(args).env("BOHMLAB_OUT", out_root).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn list_shows_all_experiments_in_stable_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = bohmlab(&["list"], dir.path());
    let b = bohmlab(&["list"], dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().next().unwrap().starts_with("two-slit"));

    let json = bohmlab(&["list", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 9);
    assert!(entries.iter().all(|e| e["reference"].as_str().is_some_and(|s| !s.is_empty())));
}

#[test]
fn fock_spectrum_two_sites_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fock");
    let o = bohmlab(&["run", "fock-spectrum", "--sites", "2", "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(read(&out.join("spectrum.csv"))).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "level,brute_force,fock,relative_deviation");
    assert_eq!(csv.lines().count(), 11);
    let meta: serde_json::Value = serde_json::from_slice(&read(&out.join("metadata.json"))).unwrap();
    assert_eq!(meta["passed"], true);
    assert_eq!(meta["params"]["sites"], 2);
}

#[test]
fn frame_report_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = bohmlab(&["run", "frame-report"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // Default output goes under $BOHMLAB_OUT/<experiment>.
    let report: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("frame-report/report.json"))).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn same_config_and_seed_give_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"params": {"members": 3000, "time": 1.0, "steps": 20}}"#).unwrap();
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = bohmlab(
                &["run", "equivariance-field", "--config", cfg.to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()],
                dir.path(),
            );
            assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    for f in ["moments.csv", "report.json", "metadata.json", "config.json"] {
        assert_eq!(read(&runs[0].join(f)), read(&runs[1].join(f)), "{f} differs");
    }
    let meta: serde_json::Value = serde_json::from_slice(&read(&runs[0].join("metadata.json"))).unwrap();
    assert_eq!(meta["seed"], 9);

    // The emitted config.json reproduces the run.
    let replay = dir.path().join("replay");
    let o = bohmlab(
        &["run", "equivariance-field", "--config", runs[0].join("config.json").to_str().unwrap(), "--out", replay.to_str().unwrap()],
        dir.path(),
    );
    assert!(code(&o) <= 1);
    assert_eq!(read(&runs[0].join("moments.csv")), read(&replay.join("moments.csv")));
}

#[test]
fn unknown_experiment_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bohmlab(&["run", "three-slit"], dir.path())), 3);
}

#[test]
fn invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let bad = dir.path().join("bad.json");
    let cases = [
        r#"{"params": {"sitez": 2}}"#,
        r#"{"colour": "red"}"#,
        r#"{"tolerances": {"nonexistent": 1.0}}"#,
        r#"{"experiment": "pointer"}"#,
        r#"{"params": {"sites": 7}}"#,
        "not json",
    ];
    for text in cases {
        std::fs::write(&bad, text).unwrap();
        let o = bohmlab(&["run", "fock-spectrum", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()], dir.path());
        assert_eq!(code(&o), 2, "{text}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&bohmlab(&["run", "fock-spectrum", "--config", missing.to_str().unwrap()], dir.path())), 2);
    // two-slit has no site count.
    assert_eq!(code(&bohmlab(&["run", "two-slit", "--sites", "2", "--out", out.to_str().unwrap()], dir.path())), 2);
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    std::fs::write(&cfg, r#"{"tolerances": {"relative_deviation": 1e-300}}"#).unwrap();
    let out = dir.path().join("strict");
    let o = bohmlab(&["run", "fock-spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    let meta: serde_json::Value = serde_json::from_slice(&read(&out.join("metadata.json"))).unwrap();
    assert_eq!(meta["passed"], false);
    assert_eq!(meta["tolerances"][0]["overridden"], true);
}
