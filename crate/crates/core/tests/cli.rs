use std::path::Path;
use std::process::Command;

use sha2::{Digest, Sha256};

const BIN: &str = env!("CARGO_BIN_EXE_levyspec");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{"schema_version": 1, "preset": "sparse(3)", "seed": 11, "n": 150, "reps": 3,
  "pop_size": 200, "sweeps": 15, "B": 8, "H": 4, "trees": 3,
  "grid": {"min": -4, "max": 4, "points": 33, "y": 0.1}, "p_max": 2}"#;

#[test]
fn compare_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let outs: Vec<_> = ["1", "4"]
        .iter()
        .map(|t| {
            let out = dir.path().join(format!("t{t}"));
            let (code, stdout, stderr) = run(&["compare", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", t]);
            assert_eq!(code, 0, "{stdout}{stderr}");
            out
        })
        .collect();
    let mut names: Vec<String> = std::fs::read_dir(&outs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    names.sort();
    assert!(names.contains(&"compare_kolmogorov.csv".to_string()));
    assert!(names.contains(&"compare.svg".to_string()));
    for n in &names {
        let a = std::fs::read(outs[0].join(n)).unwrap();
        let b = std::fs::read(outs[1].join(n)).unwrap();
        assert!(a == b, "{n} differs between thread counts");
    }
    let svg = std::fs::read_to_string(outs[0].join("compare.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="legend""#).count(), 4);
}

#[test]
fn manifest_lists_every_file_with_its_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", SMALL);
    let out = dir.path().join("o");
    let (code, _, stderr) = run(&["pwist", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["seed"], 11);
    assert!(m["stage_seeds"]["trees"].is_u64());
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    let files = m["files"].as_array().unwrap();
    let on_disk = std::fs::read_dir(&out).unwrap().count();
    assert_eq!(files.len() + 1, on_disk);
    for f in files {
        let bytes = std::fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
    let tree = std::fs::read_to_string(out.join("tree.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(tree.lines().next().unwrap()).unwrap();
    assert!(first["parent_word"].is_array() && first["child_word"].is_array() && first["conductance"].is_f64());
    let nb = std::fs::read_to_string(out.join("neighborhood.jsonl")).unwrap();
    if let Some(line) = nb.lines().next() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(rec["distance"].is_f64());
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_config(dir.path(), "empty.json", "");
    let (code, _, stderr) = run(&["esd", "--config", &empty]);
    assert_eq!(code, 2);
    assert!(stderr.contains("schema_version"), "{stderr}");

    let no_seed = write_config(dir.path(), "ns.json", r#"{"preset": "wigner"}"#);
    assert_eq!(run(&["esd", "--config", &no_seed]).0, 2);
    let out = dir.path().join("seeded");
    let tiny = write_config(dir.path(), "tiny.json", r#"{"preset": "wigner", "n": 20, "reps": 2}"#);
    assert_eq!(run(&["esd", "--config", &tiny, "--seed", "3", "--out", out.to_str().unwrap()]).0, 0);

    assert_eq!(run(&["esd"]).0, 2);
    assert_eq!(run(&["nonsense", "--config", &tiny]).0, 2);
    let typo = write_config(dir.path(), "typo.json", r#"{"preset": "wigner", "seed": 1, "nn": 3}"#);
    assert_eq!(run(&["esd", "--config", &typo]).0, 2);
}

#[test]
fn numeric_failure_exits_3_and_removes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // the ESD stage writes files before tree growth overflows its node budget
    let cfg = write_config(dir.path(), "c.json", r#"{"preset": "stable(0.5)", "seed": 1, "n": 50, "reps": 2, "B": 1000, "H": 6, "trees": 1}"#);
    let out = dir.path().join("o");
    let (code, _, stderr) = run(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{stderr}");
    assert!(!out.exists());

    let keep = dir.path().join("existing");
    std::fs::create_dir(&keep).unwrap();
    std::fs::write(keep.join("notes.txt"), "mine").unwrap();
    assert_eq!(run(&["compare", "--config", &cfg, "--out", keep.to_str().unwrap()]).0, 3);
    let left: Vec<_> = std::fs::read_dir(&keep).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from("notes.txt")]);
}

#[test]
fn plot_command() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("semicircle.csv");
    let mut csv = String::from("x,density,mc_err\n");
    for k in 0..=60 {
        let x = -3.0 + 0.1 * k as f64;
        let d = if x.abs() < 2.0 { (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI) } else { 0.0 };
        csv += &format!("{x},{d},0\n");
    }
    std::fs::write(&good, csv).unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for out in [&a, &b] {
        let (code, _, stderr) = run(&["plot", "--input", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{stderr}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,density,mc_err\n0,oops,0\n").unwrap();
    assert_eq!(run(&["plot", "--input", bad.to_str().unwrap(), "--out", a.to_str().unwrap()]).0, 2);
    let g = good.to_str().unwrap();
    assert_eq!(run(&["plot", "--input", g, "--input", g, "--input", g, "--input", g, "--input", g]).0, 2);
}

#[test]
fn validate_reports_each_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "v.json", r#"{"preset": "sparse(5)", "seed": 2, "n_schedule": [1000, 10000], "dg_reps": 20000}"#);
    let out = dir.path().join("o");
    let (code, stdout, stderr) = run(&["validate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("Pass"));
    let r: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("dg_report.json")).unwrap()).unwrap();
    for c in r["criteria"].as_array().unwrap() {
        assert_eq!(c["status"], "pass");
    }
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(s["row_counts"]["p_value"].as_f64().unwrap() > 0.0);
}

#[test]
fn wigner_esd_matches_semicircle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.json", r#"{"preset": "wigner", "seed": 4, "n": 2000, "reps": 1}"#);
    let out = dir.path().join("o");
    let (code, stdout, stderr) = run(&["esd", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(s["mean_kolmogorov_to_semicircle"].as_f64().unwrap() <= 0.05, "{stdout}");
    let header = std::fs::read_to_string(out.join("esd.csv")).unwrap();
    assert!(header.starts_with("bin_left,bin_right,mass\n"));
    assert!(std::fs::read_to_string(out.join("stieltjes.csv")).unwrap().starts_with("x,y,re_S,im_S\n"));
}
