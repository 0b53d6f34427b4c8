use std::path::Path;
use std::process::{Command, Output};

fn gmem(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmem")).args(args).arg("--config").arg(config).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const MARKOV: &str = r#"
n = 4
N = 1.0
seed = 1
sweep_param = "phi"
values = [0.0, 0.5]

[model]
family = "additive_markov_symmetric"
scale = 0.8
"#;

#[test]
fn subcommands_succeed_on_a_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.toml", MARKOV);
    let v = gmem(&["validate"], &cfg);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains("valid=true"));

    let u = gmem(&["unravel"], &cfg);
    assert_eq!(u.status.code(), Some(0));
    let text = String::from_utf8_lossy(&u.stdout);
    assert!(text.contains("residual") && text.matches("block ").count() == 4);

    let c = gmem(&["capacity", "--format", "csv"], &cfg);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&c.stdout).lines().count(), 2);

    let out = dir.path().join("rows.csv");
    let s = Command::new(env!("CARGO_BIN_EXE_gmem"))
        .args(["sweep", "--format", "csv", "--out"])
        .arg(&out)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&s.stdout).contains("transition: none"));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("param,chi_optimal,chi_coherent,gain,entangled,symmetric,residual\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write(dir.path(), "typo.toml", &MARKOV.replace("scale", "scael"));
    assert_eq!(gmem(&["sweep"], &typo).status.code(), Some(1));
    let family = write(dir.path(), "family.toml", &MARKOV.replace("additive_markov_symmetric", "markov"));
    assert_eq!(gmem(&["validate"], &family).status.code(), Some(1));
    let order = write(dir.path(), "order.toml", &MARKOV.replace("[0.0, 0.5]", "[0.5, 0.0]"));
    assert_eq!(gmem(&["sweep"], &order).status.code(), Some(1));
    assert_eq!(gmem(&["validate"], &dir.path().join("missing.toml")).status.code(), Some(1));
}

#[test]
fn numeric_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &MARKOV.replace("[0.0, 0.5]", "[0.5, 1.0]"));
    let out = gmem(&["sweep"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    // the good point is still emitted
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 2);
    assert!(report["rows"][1]["error"].as_str().unwrap().contains("phi"));
}
