use std::process::{Command, Output};

fn retrial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_retrial")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const ERG: [&str; 6] = ["--lambda", "1", "--mu", "3", "--mu0", "2"];
const NULL: [&str; 6] = ["--lambda", "2", "--mu", "1", "--mu0", "1"];
const CRIT: [&str; 6] = ["--lambda", "1", "--mu", "2", "--mu0", "1"];

fn with<'a>(cmd: &'a str, rates: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(rates);
    v.extend_from_slice(extra);
    v
}

#[test]
fn classify_reports_each_regime() {
    let o = retrial(&with("classify", &ERG, &[]));
    assert!(o.status.success());
    assert!(stdout(&o).contains("ExponentiallyErgodic") && stdout(&o).contains("x* = 2"));
    assert!(stdout(&retrial(&with("classify", &NULL, &[]))).contains("b* = 0.375"));
    let crit = retrial(&with("classify", &CRIT, &["--json"]));
    let v: serde_json::Value = serde_json::from_slice(&crit.stdout).unwrap();
    assert_eq!(v["regime"], "Critical");
}

#[test]
fn rate_emits_certificate_json() {
    let o = retrial(&with("rate", &ERG, &[]));
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["regime"], "ExponentiallyErgodic");
    assert!(v["rate"].as_f64().unwrap() >= 0.05);
    assert!(v["x_interval"].is_array() && v["b_interval"].is_array());
}

#[test]
fn exit_codes() {
    assert_eq!(retrial(&with("rate", &CRIT, &[])).status.code(), Some(3));
    assert_eq!(retrial(&["rate", "--lambda", "-1", "--mu", "1", "--mu0", "1"]).status.code(), Some(2));
    assert_eq!(retrial(&["rate", "--lambda", "1"]).status.code(), Some(2));
    assert_eq!(retrial(&with("stationary", &NULL, &[])).status.code(), Some(3));
}

#[test]
fn verify_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("null.csv");
    let out_s = out.to_str().unwrap();
    let o = retrial(&with("verify", &NULL, &["--k", "21", "--t-max", "10", "--seed", "7", "--out", out_s]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,N,observed,bound,slack\n"));
    assert_eq!(csv.lines().count(), 1 + 11 * 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("null.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"]["command"], "verify");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["truncation"], 400);
    assert!(manifest["timestamp"].as_u64().unwrap() > 0);
}

#[test]
fn transient_and_simulate_formats() {
    let t = retrial(&with("transient", &ERG, &["--t-max", "2", "--truncation", "50", "--format", "json"]));
    assert!(t.status.success());
    let snaps: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert_eq!(snaps.as_array().unwrap().len(), 3);

    let s = retrial(&with("simulate", &ERG, &["--t-max", "1", "--paths", "200", "--seed", "1"]));
    assert!(s.status.success());
    assert!(stdout(&s).starts_with("t,server,orbit,count,probability,stderr\n"));
}

#[test]
fn generator_dump_round_trips() {
    let o = retrial(&with("generator", &ERG, &["--truncation", "4"]));
    let text = stdout(&o);
    assert!(text.starts_with("Q 4"));
    let g = retrial_ergodicity::model::TruncatedGenerator::from_coo_str(&text).unwrap();
    assert_eq!(g.get(2, 2), -4.0);
}
