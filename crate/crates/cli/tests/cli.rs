use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duality-lab"))
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const COHERENT_PAIR: &str = r#"{
  "schema": 1,
  "slits": {"n": 2, "spacing": 5e-5, "intensities": [1.0, 1.0]},
  "coherence": {"kind": "fully_coherent"},
  "geometry": {"wavelength": 5e-7, "distance": 1.0}
}"#;

#[test]
fn coherent_pair_saturates() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "pair.json", COHERENT_PAIR);
    let out = run(&["run"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["v_c"].as_f64().unwrap(), 1.0);
    assert_eq!(report["d"].as_f64().unwrap(), 0.0);
    assert!((report["pyth_lhs"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!(dir.path().join("pattern.csv").exists());
    assert!(dir.path().join("analysis.json").exists());
    // oracle disabled by default
    assert!(!dir.path().join("convergence.json").exists());
}

#[test]
fn single_slit_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "one.json",
        r#"{
  "schema": 1,
  "slits": {"n": 1, "spacing": 5e-5, "intensities": [1.0]},
  "coherence": {"kind": "identity"},
  "geometry": {"wavelength": 5e-7, "distance": 1.0}
}"#,
    );
    let out = run(&["run"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n >= 2"), "{stderr}");
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn malformed_and_missing_configs_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, "bad.json", "{\"schema\": 1,\n  \"slits\": ");
    assert_eq!(run(&["measures"], &bad, dir.path()).status.code(), Some(1));

    let wrong_schema = COHERENT_PAIR.replace("\"schema\": 1", "\"schema\": 2");
    let cfg = write_config(&dir, "v2.json", &wrong_schema);
    assert_eq!(run(&["measures"], &cfg, dir.path()).status.code(), Some(1));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["pattern"], &missing, dir.path()).status.code(), Some(1));
}

#[test]
fn bundled_scenario_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    let cfg = manifest_dir().join("examples/three_slit.json");
    let out = run(&["run"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let golden = manifest_dir().join("tests/golden/three_slit");
    for name in ["pattern.csv", "report.json", "analysis.json", "mc_pattern.csv", "convergence.json"] {
        let expected = std::fs::read(golden.join(name)).unwrap();
        let found = std::fs::read(dir.path().join(name)).unwrap();
        assert!(expected == found, "{name} differs from its golden file");
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let cfg = manifest_dir().join("examples/three_slit.json");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let dir = TempDir::new().unwrap();
        let out = bin()
            .env("DUALITY_LAB_THREADS", threads)
            .args(["mc-validate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(std::fs::read(dir.path().join("mc_pattern.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn analyze_round_trips_exported_pattern() {
    let dir = TempDir::new().unwrap();
    let cfg = manifest_dir().join("examples/three_slit.json");
    assert!(run(&["pattern"], &cfg, dir.path()).status.success());
    let csv = dir.path().join("pattern.csv");
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--input")
        .arg(&csv)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = read_json(&dir.path().join("analysis.json"));
    assert_eq!(a["agree"], serde_json::Value::Bool(true));
    let golden = read_json(&manifest_dir().join("tests/golden/three_slit/analysis.json"));
    assert_eq!(a["v_c_analytic"], golden["v_c_analytic"]);
    assert!((a["v_c_operational"].as_f64().unwrap() - golden["v_c_operational"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn seed_flag_overrides_oracle_seed() {
    let cfg = manifest_dir().join("examples/three_slit.json");
    let read = |seed: &str| {
        let dir = TempDir::new().unwrap();
        let out = bin()
            .args(["mc-validate", "--seed", seed, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(dir.path().join("mc_pattern.csv")).unwrap()
    };
    let golden = std::fs::read(manifest_dir().join("tests/golden/three_slit/mc_pattern.csv")).unwrap();
    assert_eq!(read("7"), golden);
    assert_ne!(read("8"), golden);
}

#[test]
fn gamma_n_of_scenario_and_matrix_files() {
    let dir = TempDir::new().unwrap();
    let out = run(&["gamma-n"], &manifest_dir().join("examples/three_slit.json"), dir.path());
    assert!(out.status.success());
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((value - 2.0 / 3.0).abs() < 1e-15);

    let m = write_config(
        &dir,
        "gamma.json",
        r#"{"n": 2, "re": [[1.0, 0.25], [0.25, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#,
    );
    let out = run(&["gamma-n"], &m, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.25");
}

#[test]
fn scale_w_flag_rescales_the_grid_column() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "pair.json", COHERENT_PAIR);
    assert!(run(&["pattern", "--scale-w"], &cfg, dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("pattern.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,total,incoherent"));
    let first: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, -4.0);
}

const SWEEP: &str = r#"{"schema": 1, "n_min": 2, "n_max": 5, "seeds": 50, "base_seed": 11, "rank": "random"}"#;

#[test]
fn sweep_is_deterministic_and_ordered() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sweep.json", SWEEP);
    let mut tables = Vec::new();
    for sub in ["a", "b"] {
        let out = run(&["sweep"], &cfg, &dir.path().join(sub));
        assert_eq!(out.status.code(), Some(0));
        tables.push(std::fs::read_to_string(dir.path().join(sub).join("sweep.csv")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);

    let lines: Vec<&str> = tables[0].lines().collect();
    assert_eq!(lines[0], "n,seed,v_c,d,d_prime,gamma_n,c,pyth_lhs,lin_lhs");
    assert!(lines.last().unwrap().starts_with("# summary,instances=200"));
    let keys: Vec<(usize, u64)> = lines[1..lines.len() - 1]
        .iter()
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(keys.len(), 200);
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn rank_one_sweep_saturates() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "sweep.json", &SWEEP.replace("\"random\"", "\"one\""));
    assert!(run(&["sweep"], &cfg, dir.path()).status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    for line in text.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[7] - 1.0).abs() <= 1e-9, "pyth_lhs {line}");
        assert!((f[8] - 1.0).abs() <= 1e-9, "lin_lhs {line}");
    }
}
