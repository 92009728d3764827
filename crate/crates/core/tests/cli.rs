//! The command-line binary: determinism, exit codes and output layout.

use std::process::{Command, Output};

fn bin(args: &[&str], env: Option<(&str, &str)>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bvfourier"));
    c.args(args).env_remove("BVFOURIER_TOL");
    if let Some((k, v)) = env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn transform_output_is_deterministic() {
    for format in ["csv", "json"] {
        let args = ["transform", "--catalog", "arctan", "--s", "-2:2:4", "--format", format];
        let a = bin(&args, None);
        let b = bin(&args, None);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("bvfourier-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("inv.csv");
    let args = ["invert", "--catalog", "heaviside"];
    let printed = bin(&args, None);
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let written = bin(&with_out, None);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), printed.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_layout() {
    let o = bin(&["invert", "--catalog", "arctan", "--x=-2,0,0.5,3"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "input,re,im,err_estimate,expected_re,expected_im,pass");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 7);
        let x: f64 = cols[0].parse().unwrap();
        let re: f64 = cols[1].parse().unwrap();
        assert!((re - x.atan()).abs() < 1e-4);
        // 17 significant digits: one leading digit and 16 decimals
        let mantissa = cols[1].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{mantissa}");
        assert_eq!(cols[6], "true");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["transform", "--catalog", "arctan"], None).status.code(), Some(2));
    assert_eq!(bin(&["transform", "--expr", "on (0,: x", "--s", "1"], None).status.code(), Some(2));
    assert_eq!(bin(&["invert", "--catalog", "missing"], None).status.code(), Some(2));
    // s = 0 is outside the admissible set for a BV-to-zero tail
    assert_eq!(bin(&["transform", "--catalog", "pv-alpha-0.5", "--s", "0"], None).status.code(), Some(1));
    let o = bin(&["invert", "--expr", "on (-inf,0): 0 | on [0,inf): exp(-x)", "--x", "1", "--tol", "1e-300"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_variable() {
    let bad = bin(&["transform", "--catalog", "arctan", "--s", "1"], Some(("BVFOURIER_TOL", "abc")));
    assert_eq!(bad.status.code(), Some(2));
    let ok = bin(&["transform", "--catalog", "arctan", "--s", "1"], Some(("BVFOURIER_TOL", "1e-8")));
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn gauge_demo_table() {
    let o = bin(&["gauge-demo", "--seed", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for row in text.lines().skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[1], cols[2]), (0.5, 0.5));
        assert!(cols[6] >= 0.4);
    }
    assert_eq!(bin(&["gauge-demo", "--seed", "3"], None).stdout, o.stdout);
}

#[test]
fn selfcheck_subset() {
    let o = bin(&["selfcheck", "--only", "1,2,3"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}

#[test]
fn distrib_object() {
    let o = bin(&["distrib", "--catalog", "poly-tanh"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["function_part_ref"], "ĝ");
    assert!(v["delta_terms"].as_array().unwrap().len() + v["power_terms"].as_array().unwrap().len() > 0);
}
