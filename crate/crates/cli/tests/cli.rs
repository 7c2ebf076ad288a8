use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use henon_cli::RunConfig;
use tempfile::TempDir;

const SMALL: &str = r#"{
  "case": {"kind": "partial_henon", "m": 2},
  "alpha": 40,
  "alphas": [20, 40, 80],
  "grid": {"n_rho": 48, "n_sigma": 24},
  "limit": {"s_max": 12, "t_max": 12, "n_s": 40, "n_t": 40}
}"#;

fn setup(config: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, config).unwrap();
    (dir, path)
}

fn henon(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_henon"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

/// Data lines of an output file, without comment lines.
fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn config_roundtrip() {
    let config = RunConfig::parse(SMALL).unwrap();
    assert_eq!(RunConfig::parse(&config.to_json()).unwrap(), config);
    assert_eq!(config.grid.n_rho, 48);
    assert_eq!(config.p, 3.0);
    assert_ne!(config.hash(), RunConfig::default().hash());
    let moved = RunConfig { output: "elsewhere".into(), ..config.clone() };
    assert_eq!(moved.hash(), config.hash());
}

#[test]
fn solve_writes_table_and_field() {
    let (dir, config) = setup(SMALL);
    let out = dir.path().join("out");
    let o = henon(&["solve"], &config, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&out.join("solve.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("case,p,alpha,quotient"));
    assert!(rows[1].starts_with("partial_henon,3,40,"));
    assert!(rows[1].contains(",true,"));
    assert_eq!(data_lines(&out.join("field.csv")).len(), 1 + 48 * 24);
}

#[test]
fn malformed_config_exits_with_two() {
    let (dir, config) = setup(r#"{"grid": {"n_rho": 48, "n_sigmaa": 24}}"#);
    let o = henon(&["solve"], &config, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_sigmaa"));

    let (dir, config) = setup(r#"{"p": 7.0}"#);
    assert_eq!(henon(&["solve"], &config, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn missing_config_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = henon(&["solve"], &dir.path().join("absent.json"), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn partial_results_need_opt_in() {
    let cfg = SMALL.replacen("\"alpha\": 40,", "\"alpha\": 40, \"solver\": {\"max_iter\": 1},", 1);
    let (dir, config) = setup(&cfg);
    let out = dir.path().join("out");
    assert_eq!(henon(&["solve"], &config, &out).status.code(), Some(1));
    let o = henon(&["solve", "--allow-partial"], &config, &out);
    assert!(o.status.success());
    assert!(data_lines(&out.join("solve.csv"))[1].contains(",false,"));
}

#[test]
fn sweep_then_fit() {
    let (dir, config) = setup(SMALL);
    let out = dir.path().join("out");
    let o = henon(&["sweep"], &config, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = data_lines(&out.join("sweep.csv"));
    assert_eq!(sweep.len(), 4);
    let fit = data_lines(&out.join("fit.csv"));
    assert_eq!(fit.len(), 3);
    for name in ["blowup.dat", "gap.dat", "normalized_quotient.dat"] {
        assert!(out.join(name).exists(), "{name}");
    }

    let refit = dir.path().join("refit");
    let o = Command::new(env!("CARGO_BIN_EXE_henon"))
        .arg("fit")
        .arg(out.join("sweep.csv"))
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&refit)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_lines(&refit.join("fit.csv")), fit);
}

#[test]
fn limit_reports_truncation() {
    let (dir, config) = setup(SMALL);
    let out = dir.path().join("out");
    let o = henon(&["limit", "--allow-partial"], &config, &out);
    // a 12 x 12 box may or may not pass the truncation check
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&o.stderr));
    if o.status.success() {
        let rows = data_lines(&out.join("limit.csv"));
        assert!(rows[0].starts_with("gamma,p,n,value"));
        assert!(rows[1].starts_with("0.5,3,3,"));
        assert!(out.join("limit_field.csv").exists());
    }
}

#[test]
fn limit_on_wide_box() {
    let cfg = SMALL.replace(
        r#""limit": {"s_max": 12, "t_max": 12, "n_s": 40, "n_t": 40}"#,
        r#""limit": {"gamma": 1.0, "s_max": 24, "t_max": 24, "n_s": 96, "n_t": 96}"#,
    );
    let (dir, config) = setup(&cfg);
    let out = dir.path().join("out");
    let o = henon(&["limit"], &config, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fields: Vec<String> = data_lines(&out.join("limit.csv"))[1].split(',').map(String::from).collect();
    assert_eq!(fields[0], "1");
    let change: f64 = fields[5].parse().unwrap();
    assert!(change < 0.01);
}

#[test]
fn reduce_check_table() {
    let (dir, config) = setup(SMALL);
    let out = dir.path().join("out");
    assert!(henon(&["reduce-check"], &config, &out).status.success());
    let rows = data_lines(&out.join("reduce_check.csv"));
    assert_eq!(rows[0], "field,m,symbolic_residual,step,fd_error,slope");
    assert!(rows.len() > 4);
    for row in &rows[1..] {
        let symbolic: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(symbolic < 1e-10, "{row}");
    }

    let (dir, config) = setup(r#"{"case": {"kind": "hyperplane", "n": 3}}"#);
    assert_eq!(henon(&["reduce-check"], &config, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn outputs_carry_provenance() {
    let (dir, config) = setup(SMALL);
    let out = dir.path().join("out");
    assert!(henon(&["solve"], &config, &out).status.success());
    let hash = RunConfig::load(&config).unwrap().hash();
    for name in ["solve.csv", "field.csv"] {
        let first = fs::read_to_string(out.join(name)).unwrap().lines().next().unwrap().to_string();
        assert!(first.starts_with("# henon "), "{first}");
        assert!(first.contains("command=solve"));
        assert!(first.ends_with(&format!("config_sha256={hash}")));
    }
}

#[test]
fn same_seed_same_bytes() {
    let (dir, config) = setup(SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert!(henon(&["solve", "--seed", "11"], &config, out).status.success());
    }
    for name in ["solve.csv", "field.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
}
