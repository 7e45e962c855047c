use std::path::Path;
use std::process::{Command, Output};

fn magbr(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magbr"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(out: &Path, command: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(out.join(format!("{command}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn region_classifies_points() {
    let dir = tempfile::tempdir().unwrap();
    let o = magbr(dir.path(), &["region", "--delta", "0.5", "--point", "0.6666666667", "0.3333333333"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path(), "region");
    assert_eq!(m["results"]["member"], true);
    let o = magbr(dir.path(), &["region", "--delta", "0.5", "--point", "0.5", "0.5"]);
    assert!(o.status.success());
    assert_eq!(manifest(dir.path(), "region")["results"]["membership"], "outside");
}

#[test]
fn verify_exit_code_tracks_the_reports() {
    let dir = tempfile::tempdir().unwrap();
    let ok = magbr(dir.path(), &["verify", "--suite", "phase", "--suite", "flux_decay"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(manifest(dir.path(), "verify")["passed"], true);
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.starts_with("suite,name,parameters,measured_constant,threshold,samples,passed"));

    // A threshold no measured constant can meet.
    let cfg = dir.path().join("strict.toml");
    std::fs::write(&cfg, "[verify]\nbound_threshold = 1e-9\nalphas = [0.5]\n").unwrap();
    let fail = magbr(dir.path(), &["--config", cfg.to_str().unwrap(), "verify", "--suite", "flux_decay"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(manifest(dir.path(), "verify")["passed"], false);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(magbr(dir.path(), &["verify", "--suite", "nonesuch"]).status.code(), Some(2));
    let o = magbr(dir.path(), &["kernel-eval", "--delta", "-2", "--x", "1", "0", "--y", "1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));
}

#[test]
fn kernel_eval_from_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    std::fs::write(&pairs, "r1,theta1,r2,theta2\n1,0,2,1\n0.5,3,4,0.25\n").unwrap();
    let o = magbr(dir.path(), &["kernel-eval", "--alpha", "0.3", "--delta", "-0.5", "--pairs", pairs.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("kernel-eval.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn apply_matches_the_oracle_on_a_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = magbr(
        dir.path(),
        &["apply", "--alpha", "0", "--delta", "-0.4", "--n-r", "96", "--n-theta", "64", "--r-max", "12", "--gaussian", "1.5", "--oracle"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rel = manifest(dir.path(), "apply")["results"]["oracle_relative_l2"].as_f64().unwrap();
    assert!(rel < 0.05, "{rel}");
    let table = std::fs::read_to_string(dir.path().join("apply.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 96 * 64);
}

#[test]
fn ratio_sweep_and_scaling_fit_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ["--n-r", "48", "--n-theta", "64", "--r-max", "10"];
    let mut args = vec!["ratio-sweep", "--alpha", "0.5", "--point", "0.75", "0.25", "--scales", "1,2,4", "--family", "balls"];
    args.extend(grid);
    let o = magbr(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(manifest(dir.path(), "ratio-sweep")["results"]["sweeps"][0]["slope"].is_f64());

    let mut args = vec!["scaling-fit", "--alpha", "0.5", "--point", "0.75", "0.25", "--lambdas", "1,2,4"];
    args.extend(grid);
    let o = magbr(dir.path(), &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path(), "scaling-fit");
    let (e, t) = (m["results"]["exponent"].as_f64().unwrap(), m["results"]["target"].as_f64().unwrap());
    assert!((e - t).abs() < 0.1, "{e} vs {t}");
}

#[test]
fn bessel_table_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let o = magbr(dir.path(), &["bessel-table", "--nu", "-0.5,0.5", "--count", "5", "--r-min", "1", "--r-max", "2"]);
    assert!(o.status.success());
    let table = std::fs::read_to_string(dir.path().join("bessel-table.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("nu,r,value,err"));
    assert_eq!(table.lines().count(), 11);

    let o = magbr(dir.path(), &["stability", "--m", "2,4,8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest(dir.path(), "stability")["results"]["saturation_flagged"], false);
}
