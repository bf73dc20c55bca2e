use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fundomain"));
    c.env_remove("FUNDOMAIN_CACHE_DIR");
    c
}

fn small_build(out: &Path, extra: &[&str]) -> Output {
    bin()
        .args(["build", "--depth", "3", "--i-max", "8", "--n-max", "3", "--set", "check_radius=4", "--set", "grid=128"])
        .args(extra)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn build_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(small_build(&a, &[]).status.code(), Some(0));
    assert_eq!(small_build(&b, &[]).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn default_build_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = bin().arg("build").arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["version"], "fundomain-descriptor/1");
    assert_eq!(v["measure"]["atom_count"], 65 * 64);
}

#[test]
fn rational_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_build(&dir.path().join("x.json"), &["--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().last().unwrap()).unwrap();
    assert_eq!(err["error"], "RationalInput");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "depth = 5 [digits]\ni_max = 8 [rotations]\nn_max = 3 [levels]\ncheck_radius = 4 [rotations]\n").unwrap();
    let out = dir.path().join("o.json");
    let o = bin().arg("build").arg("--config").arg(&cfg).args(["--depth", "3"]).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["depth"], "3");
    assert_eq!(v["config"]["i_max"], "8");
    std::fs::write(&cfg, "depth = 5 [bits]\n").unwrap();
    let o = bin().arg("build").arg("--config").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_filters_suites_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    assert_eq!(small_build(&d, &[]).status.code(), Some(0));

    let o = bin().arg("verify").arg(&d).args(["--suite", "lemma"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(!names.is_empty());
    assert!(names.iter().all(|n| n.starts_with("lemma.")));
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);

    // Negate one atom mass.
    let mut v: Value = serde_json::from_slice(&std::fs::read(&d).unwrap()).unwrap();
    let mass = &mut v["measure"]["atoms"][5]["mass"];
    let lo = mass["lo"].as_str().unwrap().to_string();
    let hi = mass["hi"].as_str().unwrap().to_string();
    mass["lo"] = Value::String(format!("-{hi}"));
    mass["hi"] = Value::String(format!("-{lo}"));
    let t = dir.path().join("t.json");
    std::fs::write(&t, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let report = dir.path().join("r.json");
    let o = bin().arg("verify").arg(&t).args(["--suite", "conjugacy", "--report"]).arg(&report).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let norm = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "conjugacy.normalization").unwrap();
    assert_eq!(norm["status"], "fail");

    let o = bin().arg("verify").arg(&d).args(["--suite", "nonsense"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    assert_eq!(small_build(&d, &[]).status.code(), Some(0));
    let csv = dir.path().join("phi.csv");
    let o = bin().arg("export").arg(&d).args(["--what", "phi", "--samples", "1000", "--out"]).arg(&csv).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value,width"));
    assert_eq!(lines.count(), 1001);

    let o = bin().arg("export").arg(&d).args(["--what", "F", "--samples", "300"]).output().unwrap();
    let vals: Vec<f64> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));

    let o = bin().arg("export").arg(&d).args(["--what", "derivative", "--samples", "300"]).output().unwrap();
    let ok = String::from_utf8(o.stdout).unwrap().lines().skip(1).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 0.0);
    assert!(ok);

    let o = bin().arg("export").arg(&d).args(["--what", "psi"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = bin().arg("inspect").arg(&d).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("measure.atoms: 136"));
    assert!(text.contains("alpha: golden"));
}

#[test]
fn cache_dir_reuses_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("a.json");
    let run = || {
        bin()
            .env("FUNDOMAIN_CACHE_DIR", &cache)
            .args(["build", "--depth", "3", "--i-max", "4", "--n-max", "2", "--set", "check_radius=4"])
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(run().status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
}
