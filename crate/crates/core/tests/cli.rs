use std::path::Path;
use std::process::{Command, Output};

use fcstar::cli::{validate_csv, validate_report, CACHE_ENV};

fn fcstar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcstar"))
        .current_dir(dir)
        .env_remove(CACHE_ENV)
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| fcstar(tmp.path(), args).status.code();
    assert_eq!(code(&["spheres", "--model", "zd(2)", "--radius", "3"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["--help"]), Some(0));
    // The per-block condition fails on Z^2 with C = 1.
    assert_eq!(code(&["inequalities", "--model", "zd(2)", "--top", "2", "--samples", "3"]), Some(2));
    assert_eq!(code(&["spheres", "--model", "nope"]), Some(1));
    assert_eq!(code(&["bogus"]), Some(1));
    assert_eq!(code(&[]), Some(1));
    assert_eq!(code(&["budget", "--eps", "-1", "--c", "1"]), Some(1));
}

#[test]
fn reports_match_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["spheres", "--model", "free2", "--radius", "4"],
        &["growth", "--model", "heisenberg", "--p-max", "8"],
        &["haagerup-scan", "--model", "free2", "--max", "2", "--trials", "10", "--starts", "2", "--iters", "5"],
        &["cross-validate", "--max", "2"],
        &["budget", "--eps", "1", "--c", "1"],
    ];
    for args in runs {
        let out = fcstar(tmp.path(), args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let name = args[0];
        let cfg = validate_report(&read(tmp.path(), &format!("fcstar-out/{name}.json"))).unwrap();
        assert_eq!(cfg.command, name);
        let csv = tmp.path().join(format!("fcstar-out/{name}.csv"));
        if name == "budget" {
            assert!(!csv.exists());
        } else {
            assert!(validate_csv(name, &std::fs::read_to_string(csv).unwrap()).unwrap() > 0);
        }
    }
}

#[test]
fn no_csv_flag_and_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fcstar(tmp.path(), &["spheres", "--model", "zd(1)", "--out", "elsewhere", "--no-csv"]);
    assert!(out.status.success());
    assert!(tmp.path().join("elsewhere/spheres.json").exists());
    assert!(!tmp.path().join("elsewhere/spheres.csv").exists());
}

#[test]
fn cache_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let out = Command::new(env!("CARGO_BIN_EXE_fcstar"))
        .current_dir(tmp.path())
        .env(CACHE_ENV, &cache)
        .args(["spheres", "--model", "zd(2)", "--radius", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 3);
    // A second run reads the cache and reports the same sizes.
    let first = read(tmp.path(), "fcstar-out/spheres.json");
    let again = Command::new(env!("CARGO_BIN_EXE_fcstar"))
        .current_dir(tmp.path())
        .env(CACHE_ENV, &cache)
        .args(["spheres", "--model", "zd(2)", "--radius", "3"])
        .output()
        .unwrap();
    assert!(again.status.success());
    assert_eq!(read(tmp.path(), "fcstar-out/spheres.json"), first);
}

#[test]
fn saved_config_reruns_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "metric", "--model", "zd(1)", "--state", "trace", "--state", "vector:(0)=1;(1)=1", "--big-k", "1", "--big-r", "4",
        "--starts", "3", "--iters", "50",
    ];
    assert!(fcstar(tmp.path(), &args).status.success());
    let first = read(tmp.path(), "fcstar-out/metric.json");
    let cfg = validate_report(&first).unwrap();
    std::fs::write(tmp.path().join("saved.json"), cfg.to_json().unwrap()).unwrap();
    let out = fcstar(tmp.path(), &["--config", "saved.json", "--out", "rerun"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(tmp.path(), "rerun/metric.json"), first);
    assert_eq!(read(tmp.path(), "rerun/metric.csv"), read(tmp.path(), "fcstar-out/metric.csv"));
}
