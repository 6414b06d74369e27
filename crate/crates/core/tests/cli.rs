use std::process::{Command, Output};

fn wysi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wysi"))
        .args(args)
        .output()
        .expect("spawn wysi")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn qubit_example_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("example.csv");
    let o = wysi(&["qubit-example", "--phi-steps", "11", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,lhs,rhs,margin,wysi,cos_hellinger,violated"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for row in &rows {
        assert_eq!(row.len(), 7);
        let phi: f64 = row[0].parse().unwrap();
        let cos: f64 = row[5].parse().unwrap();
        let wysi: f64 = row[4].parse().unwrap();
        assert!((cos - (0.9 + 0.1 * (2.0 * phi).cos())).abs() < 1e-10);
        assert!((wysi - 0.2).abs() < 1e-12);
        assert_eq!(row[6], "false");
    }
}

#[test]
fn qubit_example_json_is_parseable() {
    let o = wysi(&["qubit-example", "--phi-steps", "5", "--format", "json", "--r0", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    assert!(points.iter().all(|p| p["margin"].as_f64().unwrap() >= 0.0));
}

#[test]
fn verify_summary_is_deterministic() {
    let args = ["verify", "--dim", "2,3", "--trials", "6", "--seed", "7", "--phi-steps", "21"];
    let a = wysi(&args);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "2"]);
    let b = wysi(&threaded);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["instances"], 6);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["seed"], 7);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["qubit-example", "--r0", "1.5"][..],
        &["verify", "--dim", "1"],
        &["sweep", "--rank", "9", "--dim", "3"],
        &["oracle", "--trials", "0"],
        &["nonsense"],
    ] {
        let o = wysi(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn oracle_passes_on_small_run() {
    let o = wysi(&["oracle", "--dim", "3", "--trials", "3", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["breaches"].as_array().unwrap().is_empty());
    assert_eq!(v["skipped_integral"], 0);
}
