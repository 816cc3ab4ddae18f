use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_widom"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(cfg: &Path, out: &Path) -> Output {
    bin().arg("run").arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn semicircle_run_has_unit_widom_factors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("semicircle.json"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "coefficients.csv", "widom.csv", "density.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let r = read_json(&dir.path().join("report.json"));
    let w = r["asymptotics"]["widom_factors"].as_array().unwrap();
    assert_eq!(w.len(), 121);
    assert!(w.iter().all(|v| (v.as_f64().unwrap() - 1.0).abs() < 1e-10));
    assert!(r["asymptotics"]["frequency"]["omegas"].as_array().unwrap().is_empty());
    for c in r["asymptotics"]["szego_checks"].as_array().unwrap() {
        assert!(c["error"].as_f64().unwrap() < 1e-6);
    }
    let csv = std::fs::read_to_string(dir.path().join("widom.csv")).unwrap();
    assert!(csv.starts_with("n,W_n\n0,"));
}

#[test]
fn two_interval_sigma0_has_half_frequency() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&config("two_interval_sigma0.json"), dir.path()).status.success());
    let r = read_json(&dir.path().join("report.json"));
    let w = r["asymptotics"]["frequency"]["omegas"].as_array().unwrap();
    assert_eq!(w.len(), 1);
    assert!((w[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let two = &r["asymptotics"]["diagnostics"]["candidate_periods"][1];
    assert_eq!(two["period"], 2);
    assert!(two["sup_deviation_p"].as_f64().unwrap() < 1e-8);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&config("semicircle_mass.json"), &a).status.success());
    assert!(run(&config("semicircle_mass.json"), &b).status.success());
    for f in ["report.json", "coefficients.csv", "widom.csv", "density.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    // idempotent in place
    let first = std::fs::read(a.join("report.json")).unwrap();
    assert!(run(&config("semicircle_mass.json"), &a).status.success());
    assert_eq!(first, std::fs::read(a.join("report.json")).unwrap());
}

#[test]
fn mass_on_support_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"schema":"widom-run/1","set":{"bands":[[-2,2]]},"measure":{"weight":{"kind":"semicircle"},"masses":[[1.0,0.1]]}}"#,
    )
    .unwrap();
    let o = run(&cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"]["code"], 2);
    assert!(e["error"]["message"].as_str().unwrap().contains("mass point on support"));
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn config_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("extra.json");
    std::fs::write(
        &cfg,
        r#"{"schema":"widom-run/1","set":{"bands":[[-2,2]]},"measure":{"weight":{"kind":"arcsine"}},"colour":"red"}"#,
    )
    .unwrap();
    let o = run(&cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "validation");

    let o = run(&dir.path().join("absent.json"), dir.path());
    assert_eq!(o.status.code(), Some(66));
    assert_eq!(error_json(&o)["error"]["code"], 66);
}

#[test]
fn usage_errors_exit_64() {
    let o = bin().args(["verify", "slow"]).output().unwrap();
    assert_eq!(o.status.code(), Some(64));
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
    let o = bin().arg("frobnicate").output().unwrap();
    assert_eq!(o.status.code(), Some(64));
    let o = bin().args(["export", "xml", "widom"]).output().unwrap();
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&config("semicircle.json"), dir.path()).status.success());
    let original = std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();

    let o = bin().args(["export", "gnuplot", "widom", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dat = std::fs::read_to_string(dir.path().join("widom.dat")).unwrap();
    let mut lines = dat.lines();
    assert_eq!(lines.next(), Some("# n W_n"));
    let row: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(row.len(), 2);
    assert_eq!(row[0], "0");

    std::fs::remove_file(dir.path().join("coefficients.csv")).unwrap();
    let o = bin().args(["export", "csv", "coefficients", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap(), original);

    for what in ["density", "almost-period"] {
        let o = bin().args(["export", "gnuplot", what, "--out"]).arg(dir.path()).output().unwrap();
        assert!(o.status.success(), "{what}");
    }
}

#[test]
fn export_without_run_exits_66() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["export", "csv", "widom", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(66));
    assert_eq!(error_json(&o)["error"]["kind"], "missing-input");
}

#[test]
fn cantor_run_completes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("cantor_gen3.json"), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["set"]["bands"].as_array().unwrap().len(), 8);
    assert_eq!(r["asymptotics"]["frequency"]["omegas"].as_array().unwrap().len(), 7);
    assert!(r["asymptotics"]["widom_factors"].as_array().unwrap().iter().all(|w| w.as_f64().unwrap() > 0.0));
    assert!(r["diagnostics"]["homogeneity"]["eta_estimate"].as_f64().unwrap() > 0.0);
}

#[test]
fn threads_and_seed_do_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = bin().args(["verify", "quick", "--threads", "1", "--seed", "1", "--out"]).arg(&a).output().unwrap();
    assert!(o.status.success());
    let o = bin().args(["verify", "quick", "--threads", "2", "--seed", "99", "--out"]).arg(&b).output().unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(a.join("verify-quick.json")).unwrap(), std::fs::read(b.join("verify-quick.json")).unwrap());
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("C10 "));
    assert!(table.contains("seed 99"));
}
