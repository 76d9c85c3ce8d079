use std::process::{Command, Output};

fn mtz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtz"))
        .args(args)
        .env_remove("MTZ_PRECISION_BITS")
        .env_remove("MTZ_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_prints_value_and_method() {
    let o = mtz(&["eval", "I", "--omega", "1", "--a", "0", "--x", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["object"], "I");
    assert!(v["method"].as_str().unwrap().contains("quadrature"));
    let value: f64 = v["value"].as_str().unwrap().parse().unwrap();
    assert!((value - 2.0).abs() < 1e-15);
}

#[test]
fn exact_objects_are_integers() {
    let o = mtz(&["eval", "Stirling", "--m", "6", "--l", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["value"], "225");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mtz(&["eval", "Nope"]).status.code(), Some(2));
    assert_eq!(mtz(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mtz(&["--bits", "many", "verify", "r2m2"]).status.code(), Some(2));
}

#[test]
fn domain_violations_exit_3() {
    // c' needs m <= r
    assert_eq!(mtz(&["eval", "cprime", "--omega", "1", "--a", "0", "--m", "2"]).status.code(), Some(3));
    // negative weight
    assert_eq!(mtz(&["eval", "I", "--omega", "-1", "--a", "0", "--x", "1"]).status.code(), Some(3));
    // r disagrees with the weights
    assert_eq!(mtz(&["expand", "--r", "3", "--omega", "1,1", "--a", "0", "--order", "2"]).status.code(), Some(3));
    // the S route needs |omega| < a
    assert_eq!(mtz(&["eval", "I-by-S", "--omega", "2", "--a", "1", "--x", "0.5"]).status.code(), Some(3));
    assert_eq!(mtz(&["verify", "nosuch"]).status.code(), Some(3));
}

#[test]
fn failing_reports_exit_1_and_are_listed() {
    let o = mtz(&["--tol", "1e-300", "verify", "r2m2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("FAILED r2m2"), "{err}");
}

#[test]
fn verify_is_deterministic_without_timing() {
    let a = mtz(&["--no-timing", "--threads", "3", "verify", "c_closed_form"]);
    let b = mtz(&["--no-timing", "--threads", "1", "verify", "c_closed_form"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    for line in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["wall_time_ms"], 0);
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn precision_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mtz"))
        .args(["eval", "Li", "--k", "2", "--z", "0.5"])
        .env("MTZ_PRECISION_BITS", "128")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["precision_bits"], 128);
}

#[test]
fn expand_starts_with_factorial() {
    let o = mtz(&["expand", "--r", "2", "--omega", "1,1", "--a", "3", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], "0\t-2\t2");
}

#[test]
fn table_writes_csv_grid() {
    let dir = std::env::temp_dir().join(format!("mtz-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.csv");
    let o = mtz(&["--csv", path.to_str().unwrap(), "table", "I", "--omega", "1,2", "--a", "0,1", "--x", "0.5,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["object", "omega", "a", "x", "value"]);
    assert_eq!(rdr.records().count(), 6);
    std::fs::remove_dir_all(dir).unwrap();
}
