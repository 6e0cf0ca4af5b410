use std::path::Path;
use std::process::{Command, Output};

fn seshadri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seshadri"))
        .args(args)
        .env_remove("SESHADRI_CONFIG")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&seshadri(&["verify", "--r", "10..13"])), 0);
    assert_eq!(code(&seshadri(&["verify", "--r", "12", "--mu0", "9/2"])), 1);
    assert_eq!(code(&seshadri(&["verify", "--r", "12", "--mu0", "7/2"])), 0);
    assert_eq!(code(&seshadri(&["table", "--r", "9"])), 2);
    assert_eq!(code(&seshadri(&["verify", "--r", "13..12"])), 2);
    assert_eq!(code(&seshadri(&["verify", "--r", "12", "--mu0", "abc"])), 2);
    assert_eq!(code(&seshadri(&["classify", "--r", "10", "--mu", "3"])), 2);
    assert_eq!(code(&seshadri(&["region", "--r", "10", "--t0", "1"])), 2);
    assert_eq!(code(&seshadri(&["coverage", "--r", "7"])), 3);
    assert_eq!(code(&seshadri(&["coverage", "--r", "8..19"])), 0);
    assert_eq!(code(&seshadri(&["bogus"])), 2);
}

#[test]
fn failing_verification_names_the_pairs() {
    let out = seshadri(&["verify", "--r", "12", "--mu0", "9/2"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 4, "{err}");
    assert!(err.contains("(3;1^8) t = 2 M = 8 delta = 4 mu_minus = 4"));
}

#[test]
fn region_depth_limit_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = seshadri(&["region", "--r", "10", "--t0", "6", "--depth", "2", "--out-dir", d]);
    assert_eq!(code(&out), 3);
    let out = seshadri(&["region", "--r", "10", "--t0", "5", "--out-dir", d]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("\"refuted\""));
}

#[test]
fn region_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = seshadri(&["region", "--r", "13", "--t0", "3", "--out-dir", d]);
    assert_eq!(code(&out), 0);
    let cert = dir.path().join("certificate-r13-t3.json");
    assert_eq!(code(&seshadri(&["audit-certificate", cert.to_str().unwrap()])), 0);

    // moving the left end above sqrt 13 breaks coverage of the band
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["root"]["mu_lo"] = serde_json::Value::String("37/10".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, value.to_string()).unwrap();
    assert_eq!(code(&seshadri(&["audit-certificate", bad.to_str().unwrap()])), 1);
    assert_eq!(
        code(&seshadri(&["audit-certificate", "/nonexistent/cert.json"])),
        2
    );
}

#[test]
fn output_is_independent_of_parallelism() {
    for format in ["json", "csv", "markdown"] {
        let one = seshadri(&["verify", "--r", "10..30", "--jobs", "1", "--format", format]);
        let many = seshadri(&["verify", "--r", "10..30", "--jobs", "8", "--format", format]);
        assert_eq!(one.stdout, many.stdout, "{format}");
    }
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let plain = seshadri(&["verify", "--r", "10..21"]);
    let first = seshadri(&["verify", "--r", "10..21", "--cache-dir", c]);
    let second = seshadri(&["verify", "--r", "10..21", "--cache-dir", c]);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);
    let names = files(&cache);
    assert_eq!(names.len(), 12);
    assert!(names
        .iter()
        .all(|n| n.starts_with("verify-r") && n.ends_with(".json")));

    // a different threshold is a different key, not a stale hit
    let probe = seshadri(&["verify", "--r", "12", "--mu0", "9/2", "--cache-dir", c]);
    assert_eq!(code(&probe), 1);
    let again = seshadri(&["verify", "--r", "12", "--cache-dir", c]);
    assert_eq!(code(&again), 0);
}

#[test]
fn environment_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("seshadri.conf");
    std::fs::write(&conf, "format = csv\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_seshadri"))
        .args(["classify", "--r", "10", "--mu", "16/5"])
        .env("SESHADRI_CONFIG", &conf)
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("r,mu,verdict"));

    let out = Command::new(env!("CARGO_BIN_EXE_seshadri"))
        .args(["classify", "--r", "10", "--mu", "16/5"])
        .env("SESHADRI_CONFIG", &conf)
        .env("SESHADRI_FORMAT", "markdown")
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("| field | value |"));

    let out = Command::new(env!("CARGO_BIN_EXE_seshadri"))
        .args(["classify", "--r", "10", "--mu", "16/5", "--format", "json"])
        .env("SESHADRI_FORMAT", "markdown")
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with('{'));
}

#[test]
fn table_layout() {
    let out = seshadri(&["table", "--r", "12", "--format", "markdown"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("| (")).collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.contains(&"| (9;3^5,2^7) | 2 | 29 | -83 |  |"));
    assert!(rows.contains(&"| (13;4^8,3^4) | 1 | 44 | -80 |  |"));

    let csv = stdout(&seshadri(&["table", "--r", "12", "--format", "csv", "--approx"]));
    assert!(csv.lines().next().unwrap().contains("mu_minus_approx"));
    assert!(csv.contains("\n12,(3;1^8),2,8,4,4,4.000000,PassMuMinusAboveThreshold\n"));
    assert!(csv.contains("\n12,\"(4;2,1^11)\",1,13,-11,,,PassNegativeDelta\n"));
}

#[test]
fn classify_report() {
    let out = seshadri(&["classify", "--r", "10", "--mu", "16/5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "ConditionallyIrrational");
    assert_eq!(v["self_intersection"], "6/25");
    assert_eq!(v["self_intersection_is_square"], false);
    assert_eq!(v["witness"], serde_json::Value::Null);
    let out = seshadri(&["classify", "--r", "10", "--mu", "3.5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["witness"]["class"], "(3;1^9)");
}
