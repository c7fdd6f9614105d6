use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qtemporal_cli::{run, Experiment, ExperimentConfig, CSV_HEADER, OUT_DIR_ENV};

fn qtemporal(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtemporal"))
        .args(args)
        .current_dir(cwd)
        .env_remove(OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn chsh_on_the_eight_states() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtemporal(&["chsh", "--out", "s.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 8);
    let states: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(states, ["H", "V", "D", "A", "L", "R", "mixed:0.84", "maximally-mixed"]);
    for r in &rows {
        assert_eq!(r[3], "S");
        assert!(r[4].starts_with("2.828427"), "{r:?}");
        // no sampling: sigma and n_sigma are empty
        assert_eq!((r[5].as_str(), r[6].as_str()), ("", ""));
    }
    assert!(dir.path().join("s.json").exists());
}

#[test]
fn reduced_visibility_is_flagged_as_violation() {
    let cfg: ExperimentConfig = "[noise]\nvisibility = 0.91".parse().unwrap();
    let report = run(Experiment::Chsh, &cfg, None).unwrap();
    assert_eq!(report.rows.len(), 8);
    for r in &report.rows {
        assert!((r.value - 2.574).abs() < 1e-3, "{}", r.value);
        assert_eq!(r.violation, Some(true));
        assert_eq!(r.bound, Some(2.0));
    }
    assert_eq!(report.violations(), 8);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["rows"][0]["violation"], serde_json::Value::Bool(true));
    assert_eq!(json["experiment"], "chsh");
    assert!(json["metadata"]["wall_time_s"].as_f64().is_some());
}

#[test]
fn ideal_hardy_on_h() {
    let cfg: ExperimentConfig = "[state]\npresets = [\"H\"]".parse().unwrap();
    let report = run(Experiment::Hardy, &cfg, None).unwrap();
    assert_eq!(report.rows.len(), 1);
    let r = &report.rows[0];
    assert_eq!((r.state.as_str(), r.scheme.as_str(), r.quantity.as_str()), ("H", "hardy", "H"));
    assert!((r.value - 0.25).abs() < 1e-12);
    assert!(r.extra["zero_conditions"] < 1e-12);
    assert!(report.to_csv().contains("hardy,H,hardy,H,0.250000000,,,0"));
}

#[test]
fn row_count_is_states_times_schemes() {
    let cfg: ExperimentConfig = r#"
        [state]
        presets = ["H", "D", "mixed:0.3"]
        [[state.explicit]]
        name = "tilted"
        matrix = "0.7 0 0.1 0.2 0.1 -0.2 0.3 0"
        [scheme]
        presets = ["chsh", "hardy"]
        [[scheme.explicit]]
        name = "zx"
        a0 = [0, 0, 1]
        a1 = [1, 0, 0]
        b0 = [0.7071067811865476, 0, 0.7071067811865476]
        b1 = [-0.7071067811865476, 0, 0.7071067811865476]
    "#
    .parse()
    .unwrap();
    for exp in [Experiment::Chsh, Experiment::Hardy] {
        let report = run(exp, &cfg, None).unwrap();
        assert_eq!(report.rows.len(), 4 * 3);
        assert_eq!(report.to_csv().lines().count(), 1 + 12);
    }
}

#[test]
fn sampled_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mc.toml",
        "experiment = \"montecarlo\"\n[state]\npresets = [\"H\", \"V\"]\n[scheme]\npresets = [\"hardy\", \"chsh\"]\n[noise]\nvisibility = 0.91\n[sampling]\nmean_total = 1e4\ntrials = 8\nseed = 5\n",
    );
    let cfg = cfg.to_str().unwrap();
    let a = qtemporal(&["montecarlo", "--config", cfg, "--out", "a.csv"], dir.path());
    let b = qtemporal(&["montecarlo", "--config", cfg, "--out", "b.csv"], dir.path());
    assert!(a.status.success() && b.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let parsed = rows(&text);
    assert_eq!(parsed.len(), 4);
    assert!(parsed.iter().all(|r| !r[5].is_empty() && !r[6].is_empty() && r[7] == "5"));

    let c = qtemporal(&["montecarlo", "--config", cfg, "--seed", "6", "--out", "c.csv"], dir.path());
    assert!(c.status.success());
    let c = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_ne!(c, text);
    assert!(rows(&c).iter().all(|r| r[7] == "6"));
}

#[test]
fn invalid_config_exits_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bad.toml", "[state]\npresets = [\"Q\"]\n"),
        ("typo.toml", "[noise]\nvisibilty = 0.9\n"),
        ("range.toml", "[noise]\nvisibility = 1.2\n"),
        ("matrix.toml", "[[state.explicit]]\nname = \"x\"\nmatrix = \"1 0 0 0 0 0 1 0\"\n"),
        ("mismatch.toml", "experiment = \"hardy\"\n"),
        (
            "axis.toml",
            "[[scheme.explicit]]\nname = \"long\"\na0 = [1, 0, 1]\na1 = [1, 0, 0]\nb0 = [0, 0, 1]\nb1 = [0, 1, 0]\n",
        ),
    ];
    for (name, text) in cases {
        let cfg = write_config(dir.path(), name, text);
        let out = qtemporal(&["chsh", "--config", cfg.to_str().unwrap()], dir.path());
        assert!(!out.status.success(), "{name}");
        assert!(!out.stderr.is_empty(), "{name}");
        assert!(!dir.path().join("chsh.csv").exists(), "{name}");
    }
    let out = qtemporal(&["chsh", "--config", "missing.toml"], dir.path());
    assert!(!out.status.success() && !out.stderr.is_empty());
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("file"), "").unwrap();
    let out = qtemporal(&["hardy", "--out", "file/sub/h.csv"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("results");
    let out = Command::new(env!("CARGO_BIN_EXE_qtemporal"))
        .args(["hardy", "--format", "structured"])
        .current_dir(dir.path())
        .env(OUT_DIR_ENV, &target)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(target.join("hardy.json")).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["value"].as_f64(), Some(0.25));
    assert!(target.join("hardy.csv").exists());
}

#[test]
fn presets_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = qtemporal(&["presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("maximally-mixed"));
    assert!(text.contains("a0=-Z"));
}

#[test]
fn other_experiments_run() {
    let cfg: ExperimentConfig = "[scan]\nsamples = 500\n[optimizer]\nrestarts = 4\n[ppbs]\nsamples = 50\n"
        .parse()
        .unwrap();
    let scan = run(Experiment::StateScan, &cfg, Some(1)).unwrap();
    assert!(scan.summary["spread"] <= 1e-9);

    let ppbs = run(Experiment::PpbsCheck, &cfg, Some(1)).unwrap();
    for r in &ppbs.rows[..2] {
        assert!((r.value - 1.0 / 9.0).abs() < 1e-12);
    }
    assert!(ppbs.rows[2].value < 1e-12);

    let spatial = run(Experiment::HardySpatialMax, &cfg, Some(1)).unwrap();
    assert!((spatial.rows[0].value - 0.0901699).abs() < 1e-6);
    assert_eq!(spatial.rows[1].violation, Some(true));

    let cfg: ExperimentConfig = "[process]\nfidelity = 0.937\n".parse().unwrap();
    let process = run(Experiment::ProcessPredict, &cfg, None).unwrap();
    assert_eq!(process.rows.len(), 8 + 2);
    assert!((2.44..=2.64).contains(&process.summary["s_avg"]));
    assert!((process.rows[9].value - 0.937).abs() < 1e-12);
}

#[test]
fn depolarized_gate_through_the_hardy_experiment() {
    let cfg: ExperimentConfig = "[noise]\ndepolarization = 0.1\n".parse().unwrap();
    let r = run(Experiment::Hardy, &cfg, None).unwrap();
    assert!(r.rows[0].value < 0.25 && r.rows[0].value > 0.0);
}
