use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmspace"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn two_points(dir: &Path) -> PathBuf {
    write(dir, "two.json", r#"{"labels":["a","b"],"dist":[[0,1],[1,0]]}"#)
}

#[test]
fn validate_exit_codes() {
    let d = TempDir::new().unwrap();
    let ok = two_points(d.path());
    let o = bin().arg("validate").arg(&ok).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(": ok"));

    let bad = write(d.path(), "bad.json", r#"{"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#);
    let o = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("triangle"));

    let garbled = write(d.path(), "garbled.json", "{\"dist\": [[0,");
    assert_eq!(code(&bin().arg("validate").arg(&garbled).output().unwrap()), 2);
    let unknown = write(d.path(), "unknown.json", r#"{"dist":[[0]],"extra":1}"#);
    assert_eq!(code(&bin().arg("validate").arg(&unknown).output().unwrap()), 2);
    assert_eq!(code(&bin().arg("validate").arg(d.path().join("missing.json")).output().unwrap()), 2);
}

#[test]
fn compute_prints_json() {
    let d = TempDir::new().unwrap();
    let x = two_points(d.path());
    let o = bin()
        .args(["compute", "obsdiam", "--kappa", "0.25", "--space"])
        .arg(&x)
        .arg("--screen")
        .arg(&x)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["witness"], serde_json::json!([0, 1]));

    let o = bin()
        .args(["compute", "realline", "--kappa", "0.25", "--r", "2", "--h", "0.05", "--space"])
        .arg(&x)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= 1.0 && 1.0 <= hi && hi - lo <= 0.2 + 1e-12);

    let o = bin().args(["compute", "obsdiam", "--space"]).arg(&x).output().unwrap();
    assert_eq!(code(&o), 2, "missing --screen and --kappa");
}

#[test]
fn scenario_reports_are_deterministic() {
    let d = TempDir::new().unwrap();
    let run = |tag: &str, workers: &str| {
        let csv = d.path().join(format!("{tag}.csv"));
        let json = d.path().join(format!("{tag}.json"));
        let o = bin()
            .env("MMSPACE_WORKERS", workers)
            .args(["scenario", "box-perturbation", "--csv"])
            .arg(&csv)
            .arg("--json")
            .arg(&json)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read(csv).unwrap(), fs::read(json).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "4");
    // the JSON echoes the config, output paths included
    assert_eq!(a.0, b.0);
    let ja: serde_json::Value = serde_json::from_slice(&a.1).unwrap();
    let jb: serde_json::Value = serde_json::from_slice(&b.1).unwrap();
    assert_eq!(ja["rows"], jb["rows"]);
    assert_eq!(ja["summary"], jb["summary"]);
    assert_eq!(run("a", "2").1, a.1);
    let text = String::from_utf8(a.0).unwrap();
    assert!(text.starts_with("scenario,n,kappa,delta,variant,value,lower,upper,verdict,witness\n"));
    assert_eq!(ja["rows"].as_array().unwrap().len(), text.lines().count() - 1);
}

#[test]
fn scenario_exit_codes_and_config() {
    let d = TempDir::new().unwrap();
    let csv = d.path().join("r.csv");
    let json = d.path().join("r.json");
    let o = bin()
        .args(["scenario", "ray-scale", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(code(&o), 1, "the quoted real-line value is reported as failing");
    assert!(fs::read_to_string(&csv).unwrap().contains("quoted-claim:explicit-map"));

    let cfg = write(
        d.path(),
        "cfg.json",
        r#"{"scenario":"countable-screen","k":6,"deltas":[0.25],"kappas":[0.25]}"#,
    );
    let o = bin()
        .args(["scenario", "countable-screen", "--config"])
        .arg(&cfg)
        .arg("--csv")
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&csv).unwrap().contains("countable-screen,6,"));

    let bad = write(d.path(), "bad.json", r#"{"kappas":[1.5]}"#);
    let o = bin().args(["scenario", "circle", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(code(&o), 2);
    assert_eq!(code(&bin().args(["scenario", "no-such"]).output().unwrap()), 2);
    let o = bin()
        .env("MMSPACE_WORKERS", "many")
        .args(["scenario", "countable-screen", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
