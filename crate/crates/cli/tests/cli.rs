use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(args)
        .output()
        .expect("spawn jacobi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn classify_verdicts() {
    let o = jacobi(&["classify", "2", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("BoundaryCritical"));
    let o = jacobi(&["classify", "1", "1"]);
    assert!(stdout(&o).contains("AbsolutelyContinuous"));
    let o = jacobi(&["classify", "3", "1"]);
    assert!(stdout(&o).contains(",Discrete"));
    assert_eq!(code(&jacobi(&["classify", "0", "1"])), 1);
}

#[test]
fn expand_header_and_formats_agree() {
    let o = jacobi(&["expand", "--grid", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,n,F_exact,F_exp,F_res,G_exact,G_exp,G_res,beta_exact,beta_exp,beta_res"
    );
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert_eq!(stderr.matches("slope_").count(), 9);
    assert!(!stderr.contains("FAIL"));

    let j = jacobi(&["expand", "--grid", "3", "--format", "json"]);
    assert_eq!(code(&j), 0);
    let v: Value = serde_json::from_str(&stdout(&j)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let body: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), body.len());
    for (line, row) in body.iter().zip(rows) {
        let obj = row.as_object().unwrap();
        assert_eq!(obj.keys().map(String::as_str).collect::<Vec<_>>(), header);
        for (field, key) in line.split(',').zip(&header) {
            assert_eq!(
                field.parse::<f64>().unwrap(),
                obj[*key].as_f64().unwrap(),
                "{key}"
            );
        }
    }
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 9);
    assert!(v["config"]["K"].is_number());
}

#[test]
fn expand_rejects_off_boundary_family() {
    let o = jacobi(&["expand", "--c1", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("critical"));
}

#[test]
fn kelley_default_config_passes() {
    let o = jacobi(&["kelley"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 18);
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("sharpness_plus@1,"));
    assert!(stderr.contains("valid_from_uniform_plus,4.5142700000000000e5"));
}

#[test]
fn kelley_bad_bounds_and_cap() {
    assert_eq!(code(&jacobi(&["kelley", "--a-plus", "0.11"])), 1);
    // default bounds cannot be certified below ~8e4 at λ = 1
    let o = jacobi(&["kelley", "--grid", "1", "--s-cap", "20000"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fails at n ="));
}

#[test]
fn spectrum_on_small_window() {
    let o = jacobi(&[
        "spectrum", "--lo", "2.5", "--hi", "3.5", "--n-max", "2000", "--format", "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let l = rows[0]["lambda_shoot"].as_f64().unwrap();
    assert!((l - 2.985_208_720_316).abs() < 1e-10);
    assert!(rows[0]["spread"].as_f64().unwrap() < 1e-6);
    // no fit without n ≥ 1e5
    assert_eq!(rows[0]["decay_ratio"], Value::String("nan".into()));
}

#[test]
fn solve_dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dump.csv");
    let p = path.to_str().unwrap();
    let o = jacobi(&["solve", "--lambda", "1", "--n-max", "10000", "--out", p]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,sign,logmag"));
    assert_eq!(lines.next(), Some("1,1,0.0000000000000000e0"));
    assert_eq!(lines.next(), Some("2,0,-inf"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("growth_ratio@10000"));

    let v = jacobi(&["solve", "--lambda", "1", "--verify", p]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));

    // a corrupted value is a failed verdict
    let bad = text.replacen("\n5,", "\n5,-", 1).replace(",--", ",-");
    let bad_path = dir.path().join("bad.csv");
    std::fs::write(&bad_path, bad).unwrap();
    let v = jacobi(&[
        "solve",
        "--lambda",
        "1",
        "--verify",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&v), 2);
}

#[test]
fn solve_backward_and_seeded_forward() {
    let o = jacobi(&[
        "solve", "--lambda", "1.5", "--kind", "backward", "--n-max", "500",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 501);
    let o = jacobi(&[
        "solve", "--lambda", "1.5", "--kind", "forward", "--seed", "0", "0", "--n-max", "50",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn defaults_reload_through_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = jacobi(&["defaults", "--lo", "1.25"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("lo=1.25\n"));
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, &text).unwrap();
    let again = jacobi(&["defaults", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&again), text);
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "colour=red\n").unwrap();
    assert_eq!(
        code(&jacobi(&["defaults", "--config", bad.to_str().unwrap()])),
        1
    );
    assert_eq!(
        code(&jacobi(&[
            "defaults",
            "--config",
            Path::new("/nonexistent").to_str().unwrap()
        ])),
        1
    );
}
