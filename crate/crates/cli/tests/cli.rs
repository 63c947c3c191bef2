use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-verify"))
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/acceptance.json")
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn l2_job(name: &str, b: f64) -> Value {
    json!({
        "name": name,
        "kind": "verify",
        "theorem_id": "unified_hardy",
        "params": {"Q": 4, "p": 2, "a": 1, "b": b, "c": 1},
        "function": "mul(bump(0.2,0.8), powr(1))"
    })
}

#[test]
fn example_suite_passes() {
    let out = tempfile::tempdir().unwrap();
    let o = run("run", &example_config(), out.path(), &["--jobs", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let jobs = stdout.lines().filter(|l| l.starts_with("PASS")).count();
    assert_eq!(jobs, 19, "{stdout}");
    for ext in ["json", "csv", "dat"] {
        assert!(out.path().join(format!("boundary-scan.{ext}")).exists());
    }
}

#[test]
fn b_below_one_is_a_constraint_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &json!({"schema": 1, "jobs": [l2_job("bad", 0.5)]}));
    let o = run("verify", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("b>1"), "{}", text(&o));
    assert!(!dir.path().join("out").exists(), "nothing is written on config errors");
}

#[test]
fn constraint_errors_stop_all_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"schema": 1, "jobs": [l2_job("good", 2.0), l2_job("bad", 0.5)]}),
    );
    let o = run("verify", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!text(&o).contains("PASS"), "validation precedes computation");
}

#[test]
fn empty_jobs_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &json!({"schema": 1, "jobs": []}));
    let o = run("run", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        json!({"schema": 1, "jobs": [l2_job("a", 2.0)], "extra": true}),
        json!({"schema": 2, "jobs": [l2_job("a", 2.0)]}),
        json!({"schema": 1, "jobs": [l2_job("a", 2.0), l2_job("a", 2.0)]}),
        json!({"schema": 1, "jobs": [{"kind": "verify", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "b": 2, "zeta": 1}, "function": "bump(0.2,0.8)"}]}),
        json!({"schema": 1, "jobs": [{"kind": "sharpness", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "b": 2}}]}),
        json!({"schema": 1, "jobs": [{"kind": "verify", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "b": 2}, "function": "bump(0.2"}]}),
        json!({"schema": 1, "jobs": [{"kind": "verify", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "b": 2}}]}),
    ];
    for cfg in cases {
        let path = write_config(dir.path(), &cfg);
        let o = run("run", &path, &dir.path().join("out"), &[]);
        assert_eq!(o.status.code(), Some(2), "{cfg}: {}", text(&o));
    }
    let o = run("run", &dir.path().join("missing.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn subcommands_select_their_kind() {
    let out = tempfile::tempdir().unwrap();
    let o = run("mc-check", &example_config(), out.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).all(|l| l.contains("[mc-check ")));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &json!({"schema": 1, "jobs": [l2_job("a", 2.0)]}));
    let o = run("sweep", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("no jobs of kind sweep"));
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"schema": 1, "jobs": [{"name": "coarse", "kind": "sharpness", "theorem_id": "boundary_scan",
            "params": {"Q": 4, "p": 2, "a": 1, "b": 2, "c": 1}, "options": {"offsets": [2.0, 1.0]}}]}),
    );
    let o = run("sharpness", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1), "{}", text(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("coarse.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "fail");
}

#[test]
fn sweep_marks_inadmissible_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"schema": 1, "output": {"formats": ["json", "csv", "gnuplot-dat"]}, "jobs": [{
            "name": "c-sweep", "kind": "sweep", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "a": 1}, "function": "mul(bump(0.2,0.8), powr(1))",
            "grids": {"b": [0.5, 2.0], "c": [1.0, 2.0, 3.0, 3.5]}
        }]}),
    );
    let o = run("sweep", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let csv = fs::read_to_string(dir.path().join("c-sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    let inadmissible = rows.iter().filter(|r| r.contains(",inadmissible,")).count();
    // b = 0.5 everywhere, plus c = 3.5 beyond the critical value 3 at b = 2.
    assert_eq!(inadmissible, 5, "{csv}");
    let dat = fs::read_to_string(dir.path().join("c-sweep.dat")).unwrap();
    assert!(dat.contains("\n\n"), "blocks are separated for surface plots");
}

#[test]
fn psi_coefficient_vanishes_linearly_toward_critical_c() {
    let dir = tempfile::tempdir().unwrap();
    let cs = [2.0, 2.5, 2.75, 3.0];
    let cfg = write_config(
        dir.path(),
        &json!({"schema": 1, "output": {"formats": ["json"]}, "jobs": [{
            "name": "to-critical", "kind": "sweep", "theorem_id": "unified_hardy",
            "params": {"Q": 4, "p": 2, "a": 1, "b": 2}, "function": "mul(bump(0.2,0.8), powr(1))",
            "grids": {"c": cs}
        }]}),
    );
    let o = run("sweep", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("to-critical.json")).unwrap()).unwrap();
    let cells = report["result"]["cells"].as_array().unwrap();
    let psi = |i: usize| cells[i]["report"]["terms"]["psi"]["value"].as_f64();
    // At the critical value the term is absent; below it, psi / (critical - c) stays bounded.
    assert!(psi(3).is_none());
    let per_gap: Vec<f64> = (0..3).map(|i| psi(i).unwrap() / (3.0 - cs[i])).collect();
    assert!(per_gap.iter().all(|&v| v > 0.0));
    assert!(per_gap[2] / per_gap[0] < 2.0 && per_gap[2] / per_gap[0] > 0.5, "{per_gap:?}");
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "3")] {
        let o = run("run", &example_config(), dir.path(), &["--jobs", jobs, "--seed", "5"]);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 57, "three files per job and no leftovers");
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn seeds_and_tolerance_scale_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut job = l2_job("scaled", 2.0);
    job["tolerances"] = json!({"scale": 2.0});
    let mc = json!({"name": "mc", "kind": "mc-check", "theorem_id": "fundamental_inequality",
        "params": {"p": 3}, "options": {"samples": 20000}, "seed": 99});
    let cfg = write_config(dir.path(), &json!({"schema": 1, "seed": 4, "jobs": [job, mc]}));
    let o = run("run", &cfg, dir.path(), &["--seed", "7", "--tol-scale", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let read = |n: &str| -> Value { serde_json::from_str(&fs::read_to_string(dir.path().join(n)).unwrap()).unwrap() };
    let scaled = read("scaled.json");
    assert_eq!(scaled["seed"], 7);
    assert_eq!(scaled["tol_scale"], 6.0);
    assert_eq!(read("mc.json")["seed"], 99);
}

#[test]
fn concrete_models_need_matching_norms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &json!({"schema": 1, "jobs": [{"kind": "verify", "theorem_id": "chains",
            "model": {"kind": "heisenberg"}, "function": "bump(0.2,0.8)"}]}),
    );
    let o = run("verify", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("Euclidean"), "{}", text(&o));
}
