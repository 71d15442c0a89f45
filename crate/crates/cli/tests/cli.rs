use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_multistable"));
    c.env_remove("MULTISTABLE_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const FBM: &str = r#"{
    "process": {"kind": "fbm", "h": 0.7},
    "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 21}, "n_paths": 1, "seed": 3}
}"#;

#[test]
fn simulate_writes_one_csv_per_path() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", FBM);
    let out = d.path().join("out");
    let o = run(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(out.join("path_00000.csv")).unwrap();
    let rows = csv.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 21 + 1);
    assert!(out.join("plot.gp").exists());
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["seed"], 3);
    assert_eq!(m["files"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_is_deterministic_across_runs_and_threads() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "multistable_levy", "alpha": {"kind": "linear", "intercept": 1.3, "slope": 0.5}},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 11}, "n_paths": 100, "seed": 8,
                           "truncation": {"y_max": 100}}
        }"#,
    );
    let mut digests = Vec::new();
    for (k, threads) in ["1", "4", "1"].iter().enumerate() {
        let out = d.path().join(format!("o{k}"));
        let o = run(bin().env("MULTISTABLE_THREADS", threads).args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        digests.push(json(&out.join("manifest.json"))["digest"].as_str().unwrap().to_string());
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0], digests[2]);
    let a = fs::read(d.path().join("o0/path_00042.csv")).unwrap();
    let b = fs::read(d.path().join("o2/path_00042.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn wide_output_has_a_column_per_path() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "fbm", "h": 0.4},
            "simulation": {"t_grid": [0, 0.5, 1], "n_paths": 3, "seed": 1},
            "output": {"wide": true, "plot_script": false}
        }"#,
    );
    let out = d.path().join("o");
    assert_eq!(code(&run(bin().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out))), 0);
    let csv = fs::read_to_string(out.join("paths.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "t,y0,y1,y2"));
    assert!(!out.join("plot.gp").exists());
}

#[test]
fn invalid_configs_exit_2() {
    let d = TempDir::new().unwrap();
    let bad_alpha = write_config(
        d.path(),
        "a.json",
        r#"{
            "process": {"kind": "multistable_levy", "alpha": 2.5},
            "simulation": {"t_grid": [0, 1]}
        }"#,
    );
    let o = run(bin().args(["verify", "--suite", "reduction", "--config"]).arg(&bad_alpha).arg("--out").arg(d.path().join("o")));
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha") && err.contains("2.5"), "{err}");

    let cfg = write_config(d.path(), "c.json", FBM);
    let o = run(bin().args(["verify", "--suite", "bogus", "--config"]).arg(&cfg).arg("--out").arg(d.path().join("o")));
    assert_eq!(code(&o), 2);
    let missing = run(bin().args(["simulate", "--config", "/nonexistent.json", "--out"]).arg(d.path()));
    assert_eq!(code(&missing), 2);
    let garbage = write_config(d.path(), "g.json", "{not json");
    assert_eq!(code(&run(bin().args(["simulate", "--config"]).arg(&garbage).arg("--out").arg(d.path()))), 2);
    assert_eq!(code(&run(bin().arg("frobnicate"))), 2);
}

#[test]
fn verify_reduction_and_cheap_checks_pass() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "multistable_levy", "alpha": 1.5},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 21}, "n_paths": 5, "seed": 2},
            "verify": {"n": 3000}
        }"#,
    );
    let out = d.path().join("o");
    let o = run(bin()
        .args(["verify", "--suite", "reduction,cf-check,moment-scaling,localisability", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out));
    assert_eq!(code(&o), 0, "{}", fs::read_to_string(out.join("report.txt")).unwrap_or_default());
    let r = json(&out.join("report.json"));
    assert_eq!(r["schema_version"], 1);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["pass"] == true && c["seeds"][0] == 2));
    assert!(out.join("cf-check.csv").exists());
    assert!(fs::read_to_string(out.join("report.txt")).unwrap().contains("4/4 checks passed"));
}

#[test]
fn verify_sssi_and_transfer() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "fbm", "h": 0.7},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 21}, "seed": 3},
            "verify": {"n": 2000}
        }"#,
    );
    let out = d.path().join("o");
    let o = run(bin().args(["verify", "--suite", "sssi,transfer-condition", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // sssi is only defined for self-similar kinds
    let mbm = write_config(
        d.path(),
        "m.json",
        r#"{
            "process": {"kind": "mbm", "h": {"kind": "linear", "intercept": 0.3, "slope": 0.4}},
            "simulation": {"t_grid": [0, 1]}
        }"#,
    );
    let o = run(bin().args(["verify", "--suite", "sssi", "--config"]).arg(&mbm).arg("--out").arg(&out));
    assert_eq!(code(&o), 2);
}

#[test]
fn estimate_recovers_fbm_h() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "fbm", "h": 0.7},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 257}, "n_paths": 500, "seed": 12}
        }"#,
    );
    let out = d.path().join("o");
    let o = run(bin().args(["estimate", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let e = json(&out.join("estimates.json"));
    for p in e["probes"].as_array().unwrap() {
        let h = p["h"].as_f64().unwrap();
        assert!((h - 0.7).abs() < 0.05, "{h}");
    }
    assert!(fs::read_to_string(out.join("estimates.csv")).unwrap().starts_with("u,h,h_se,alpha,alpha_se\n"));
}

#[test]
fn estimate_tracks_alpha_of_multistable_levy() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
            "process": {"kind": "multistable_levy", "alpha": {"kind": "linear", "intercept": 1.3, "slope": 0.6}},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 257}, "n_paths": 500, "seed": 5},
            "estimate": {"probes": [0.25, 0.75], "window": 0.0625}
        }"#,
    );
    let out = d.path().join("o");
    let o = run(bin().args(["estimate", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let e = json(&out.join("estimates.json"));
    let a: Vec<f64> = e["probes"].as_array().unwrap().iter().map(|p| p["alpha"].as_f64().unwrap()).collect();
    assert!(a[0] < a[1], "{a:?}");
    assert!((a[0] - 1.45).abs() < 0.1 && (a[1] - 1.75).abs() < 0.1, "{a:?}");
}

#[test]
fn estimate_from_files() {
    let d = TempDir::new().unwrap();
    let sim_cfg = write_config(
        d.path(),
        "s.json",
        r#"{
            "process": {"kind": "fbm", "h": 0.5},
            "simulation": {"t_grid": {"start": 0, "stop": 1, "n": 65}, "n_paths": 200, "seed": 9}
        }"#,
    );
    let paths = d.path().join("paths");
    assert_eq!(code(&run(bin().args(["simulate", "--config"]).arg(&sim_cfg).arg("--out").arg(&paths))), 0);
    let glob = format!("{}/path_*.csv", paths.display());
    let out = d.path().join("est");
    let o = run(bin().args(["estimate", "--config"]).arg(&sim_cfg).args(["--paths", &glob, "--out"]).arg(&out));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&out.join("estimates.json"))["source"].as_str().unwrap().starts_with("files"));

    let empty = format!("{}/nothing_*.csv", paths.display());
    assert_eq!(code(&run(bin().args(["estimate", "--config"]).arg(&sim_cfg).args(["--paths", &empty, "--out"]).arg(&out))), 2);
    fs::write(paths.join("path_99999.csv"), "t,y\n0,oops\n").unwrap();
    assert_eq!(code(&run(bin().args(["estimate", "--config"]).arg(&sim_cfg).args(["--paths", &glob, "--out"]).arg(&out))), 2);
}
