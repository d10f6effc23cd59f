use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_divform"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn divform")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn spectrum_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let csv = dir.path().join("s.csv");
    let cfg = config("unit_square_scalar.toml");
    let o = run(&["spectrum", "--config", s(&cfg), "--out", s(&out), "--csv", s(&csv), "--resolution", "32", "--k", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["command"], "spectrum");
    assert_eq!(r["config"]["domain"]["resolution"], 32);
    let spectrum = r["spectrum"].as_array().unwrap();
    assert_eq!(spectrum.len(), 3);
    let first = spectrum[0]["value"].as_f64().unwrap();
    assert!((first - 2.0 * std::f64::consts::PI.powi(2)).abs() < 0.02 * first);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue,residual");
    assert_eq!(lines.len(), 4);
}

#[test]
fn verify_passes_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/verify.json");
    let cfg = config("coupled_anisotropic.toml");
    let o = run(&["verify", "--config", s(&cfg), "--out", s(&out), "--resolution", "24", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out);
    assert_eq!(r["all_passed"], true);
    assert!(!r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn json_and_toml_configs_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("arc.json");
    let cfg = config("clamped_arc.json");
    let o = run(&["verify", "--config", s(&cfg), "--out", s(&out), "--resolution", "64", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&out)["constants"]["h0"], 1.0);
}

#[test]
fn sweep_writes_reports_summary_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sweep");
    let dumps = dir.path().join("dumps");
    let cfg = config("coupled_anisotropic.toml");
    let o = run(&[
        "sweep", "--config", s(&cfg), "--param", "problem.alpha", "--values", "0,0.5,1",
        "--out-dir", s(&out_dir), "--resolution", "16", "--k", "3", "--dump-matrices", s(&dumps),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "value,sigma_1,sigma_2,sigma_3,tightest_slack");
    assert_eq!(lines.len(), 4);
    let firsts: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(firsts.windows(2).all(|w| w[1] >= w[0]));
    for i in 0..3 {
        let r = read_json(&out_dir.join(format!("report_{i:03}.json")));
        assert_eq!(r["config"]["problem"]["alpha"].as_f64().unwrap(), [0.0, 0.5, 1.0][i]);
        let k = std::fs::read_to_string(dumps.join(format!("point_{i:03}/K.txt"))).unwrap();
        let first: Vec<&str> = k.lines().next().unwrap().split_whitespace().collect();
        assert_eq!(first.len(), 3);
        assert!(dumps.join(format!("point_{i:03}/M.txt")).exists());
    }
}

#[test]
fn matrix_dump_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("unit_square_scalar.toml");
    let o = run(&[
        "spectrum", "--config", s(&cfg), "--out", s(&dir.path().join("r.json")), "--resolution", "8", "--k", "2",
        "--dump-matrices", s(dir.path()),
    ]);
    assert!(o.status.success());
    let mut entries = std::collections::HashMap::new();
    for line in std::fs::read_to_string(dir.path().join("K.txt")).unwrap().lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let (r, c): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        entries.insert((r, c), f[2].parse::<f64>().unwrap());
    }
    assert!(!entries.is_empty());
    for ((r, c), v) in &entries {
        assert_eq!(entries.get(&(*c, *r)), Some(v));
    }
}

#[test]
fn errors_exit_two_with_context() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let o = run(&["verify", "--config", s(&missing), "--out", s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[domain]\nkind = \"box\"\nlengths = [1.0]\nresolution = 16\nbogus = 1\n[problem]\nkind = \"scalar_second_order\"\n").unwrap();
    let o = run(&["spectrum", "--config", s(&bad), "--out", s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("r.json").exists());

    let cfg = config("unit_square_scalar.toml");
    let o = run(&["sweep", "--config", s(&cfg), "--param", "domain.nope", "--values", "1", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overrides_are_recorded_in_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = config("unit_square_scalar.toml");
    let o = run(&["spectrum", "--config", s(&cfg), "--out", s(&out), "--resolution", "12", "--k", "2", "--tol", "1e-7", "--seed", "9"]);
    assert!(o.status.success());
    let r = read_json(&out);
    assert_eq!(r["config"]["solve"]["k"], 2);
    assert_eq!(r["config"]["solve"]["seed"], 9);
    assert_eq!(r["config"]["solve"]["tol"].as_f64(), Some(1e-7));
    assert_eq!(r["solver"]["seed"], 9);
}
