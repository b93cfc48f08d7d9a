use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sklab")).args(args).env_remove("SKLAB_SEED").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn e6_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curves");
    let out = sklab(&["exp", "e6", "--u", "2", "--csv-dir", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["experiment"], "e6");
    assert_eq!(report["config"]["u"], 2.0);
    assert_eq!(report["passed"], true);
    let ladder = fs::read_to_string(csv.join("e6_ladder.csv")).unwrap();
    assert!(ladder.starts_with("n,difference_m1,pair_wm1,pair_m1_lower,pair_m1_upper\n"));
    assert_eq!(ladder.lines().count(), 49);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(sklab(&["exp", "e1", "--bogus"]).status.code(), Some(2));
    assert_eq!(sklab(&["exp", "e9"]).status.code(), Some(2));
    assert_eq!(sklab(&["exp", "e1", "--n", "10"]).status.code(), Some(2));
    assert_eq!(sklab(&["exp", "e5", "--norming", "marginal"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "sample_size = 5\n");
    assert_eq!(sklab(&["exp", "e1", "--config", &bad]).status.code(), Some(2));

    let bad_seed = Command::new(env!("CARGO_BIN_EXE_sklab"))
        .args(["exp", "e6"])
        .env("SKLAB_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_seed.status.code(), Some(2));
}

#[test]
fn failed_criteria_exit_1() {
    // three series terms leave far too much mass in the tail
    let out = sklab(&[
        "exp",
        "e2",
        "--n",
        "1000",
        "--reps",
        "200",
        "--block-len",
        "30",
        "--truncation",
        "3",
        "--limit-reps",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL e2 series_tail_bound"));
}

#[test]
fn seed_precedence_file_env_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "seed = 5\nn = 1000\nreps = 100\nblock_len = 20\n");
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sklab"));
        cmd.args(["exp", "e1", "--config", &cfg]).env_remove("SKLAB_SEED");
        if let Some(s) = env {
            cmd.env("SKLAB_SEED", s);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        json(&out)["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 5);
    assert_eq!(run(Some("6"), None), 6);
    assert_eq!(run(Some("6"), Some("7")), 7);
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let args = ["exp", "e1", "--n", "1000", "--reps", "300", "--block-len", "20", "--seed", "9"];
    let one = json(&sklab(&[&["--threads", "1"][..], &args[..]].concat()));
    let two = json(&sklab(&[&["--threads", "3"][..], &args[..]].concat()));
    assert_eq!(one["statistics"], two["statistics"]);
    assert_eq!(one["criteria"], two["criteria"]);
}

#[test]
fn merge_concatenates() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(sklab(&["exp", "e6", "--out", a.to_str().unwrap()]).status.success());
    assert!(sklab(&["exp", "e6", "--u", "2", "--out", b.to_str().unwrap()]).status.success());
    let out = sklab(&["report", "merge", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let merged = json(&out);
    assert_eq!(merged.as_array().unwrap().len(), 2);
    assert_eq!(merged[1]["config"]["u"], 2.0);
}

#[test]
fn simulate_then_measure() {
    let dir = tempfile::tempdir().unwrap();
    let pair = dir.path().join("pair.json");
    let diff = dir.path().join("diff.json");
    let p = pair.to_str().unwrap();
    let d = diff.to_str().unwrap();
    assert!(sklab(&["simulate", "--n", "200", "--seed", "3", "--out", p]).status.success());
    assert!(sklab(&["simulate", "--n", "200", "--seed", "3", "--process", "difference", "--out", d]).status.success());

    let same = json(&sklab(&["dist", "wm1", p, p]));
    assert_eq!(same["value"], 0.0);
    let m1 = json(&sklab(&["dist", "m1", d, d]));
    assert_eq!(m1["value"], 0.0);
    let omega = json(&sklab(&["dist", "omega", d, "--delta", "0.01"]));
    assert!(omega["omega"].as_f64().unwrap() >= 0.0);

    // a scalar path has no weak M1 distance
    assert_eq!(sklab(&["dist", "wm1", d, d]).status.code(), Some(2));

    let bump = write(dir.path(), "bump.json", r#"{"dim":1,"v0":[0.0],"t":[0.4,0.5],"v":[[0.5],[0.0]]}"#);
    let zero = write(dir.path(), "zero.json", r#"{"dim":1,"v0":[0.0],"t":[],"v":[]}"#);
    let d = json(&sklab(&["dist", "m1", &bump, &zero]));
    assert!((d["value"].as_f64().unwrap() - 0.5).abs() <= 1e-9, "{d}");
}

#[test]
fn limit_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("draws.csv");
    let out = sklab(&["limit", "--reps", "500", "--truncation", "1000", "--samples-csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["spec"]["theta"], 0.5);
    assert!(v["tail_bound"].as_f64().unwrap() > 0.0);
    assert_eq!(v["quantiles"].as_array().unwrap().len(), 2);
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 1 + 500 * 2);
}
