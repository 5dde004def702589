use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tangent-spde"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tangent-spde-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn summary(out: &Path, command: &str) -> Value {
    let text = fs::read_to_string(out.join(format!("{command}_summary.json"))).unwrap();
    serde_json::from_str::<Value>(&text).unwrap()["summary"].clone()
}

#[test]
fn sample_is_byte_identical_across_runs() {
    let d = scratch("sample");
    let files = ["sample.csv", "sample_summary.json"];
    let mut runs = Vec::new();
    for seed in ["7", "7", "8"] {
        let o = run(&["sample", "--t", "1.0", "--seed", seed], &d);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        runs.push(files.map(|f| fs::read(d.join(f)).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    assert_ne!(runs[0][0], runs[2][0]);
}

#[test]
fn csv_carries_seed_and_config() {
    let d = scratch("meta");
    let o = run(&["ml", "--seed", "11"], &d);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(d.join("ml.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tangent-spde"));
    assert_eq!(lines.next().unwrap(), "# seed: 11");
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "z,e_beta_1,e_beta_beta,e_beta_b2,estar"
    );
}

#[test]
fn json_format_writes_row_objects() {
    let d = scratch("json");
    let o = run(&["covariance", "--format", "json"], &d);
    assert_eq!(o.status.code(), Some(0));
    let v: Value =
        serde_json::from_str(&fs::read_to_string(d.join("covariance.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 18);
    assert!(v["rows"][0]["re"].is_number());
}

#[test]
fn bad_input_exits_2() {
    let d = scratch("bad");
    assert_eq!(run(&["sample", "--t", "-1"], &d).status.code(), Some(2));
    assert_eq!(run(&["chebyshev", "--eps", "0"], &d).status.code(), Some(2));
    assert_eq!(run(&["nonsense"], &d).status.code(), Some(2));
    let cfg = d.with_extension("json");
    fs::write(&cfg, "{\"seed\": 1}").unwrap();
    let o = bin().args(["ml", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inadmissible_model_exits_3() {
    let d = scratch("inadmissible");
    for cmd in ["sample", "combined", "covariance", "chebyshev"] {
        let o = run(&[cmd, "--nu", "2"], &d);
        assert_eq!(o.status.code(), Some(3), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("admissib"));
    }
}

#[test]
fn validate_passes_on_default_config() {
    let d = scratch("validate");
    let o = run(&["validate"], &d);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = summary(&d, "validate");
    assert_eq!(s["passed"], Value::Bool(true));
    assert_eq!(s["checks"], 12);
}

#[test]
fn truncation_study_recovers_unit_slope_at_nu_4() {
    let d = scratch("truncation");
    let o = run(&["truncation-study", "--nu", "4"], &d);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&d, "truncation_study");
    let slope = s["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn cauchy_norms_do_not_grow() {
    let d = scratch("cauchy");
    assert_eq!(run(&["cauchy"], &d).status.code(), Some(0));
    let text = fs::read_to_string(d.join("cauchy_norms.csv")).unwrap();
    let norms: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(norms.len() >= 2);
    assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
}
