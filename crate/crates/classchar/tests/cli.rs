use std::process::{Command, Output};

fn classchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_classchar")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_claim_passes_with_zero_exit() {
    let o = classchar(&["verify", "frob", "--group", "SL(2,3)"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["claim"], "frob");
}

#[test]
fn monte_carlo_needs_a_seed() {
    let o = classchar(&["verify", "big-support", "--group", "SL(3,2)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
}

#[test]
fn identical_seeds_give_identical_json() {
    let args = ["verify", "big-support", "--group", "SL(3,2)", "--seed", "17", "--trials", "300"];
    let a = classchar(&args);
    let b = classchar(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = classchar(&["verify", "big-support", "--group", "SL(3,2)", "--seed", "18", "--trials", "300"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn walk_csv_and_conventions() {
    let l1 = stdout(&classchar(&["walk", "--group", "SL(3,2)", "--class", "2", "--exact", "--format", "csv"]));
    let half = stdout(&classchar(&["walk", "--group", "SL(3,2)", "--class", "2", "--exact", "--format", "csv", "--tv-convention", "half"]));
    assert!(l1.starts_with("n,tv_l1,"));
    assert!(half.starts_with("n,tv_half,"));
    let first = |s: &str| s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert!((first(&l1) - 2.0 * first(&half)).abs() < 1e-12);
}

#[test]
fn thompson_reports_a_witness() {
    let o = classchar(&["thompson", "--group", "SL(3,2)"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["data"]["witness"].is_u64());
}

#[test]
fn powerword_and_cover() {
    let o = classchar(&["powerword", "--group", "SL(2,5)", "--N", "30", "--format", "table"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("N=30"));
    let o = classchar(&["cover", "--group", "SL(2,3)", "--class", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["data"]["covered"].as_array().unwrap().len(), 1);
}

#[test]
fn element_from_matrix() {
    let o = classchar(&["element", "--group", "SL(2,4)", "--matrix", "z 0; 0 z^2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["member"], true);
    assert_eq!(v["order"], 3);
    assert_eq!(v["support"], 1);
    let bad = classchar(&["element", "--group", "SL(2,3)", "--matrix", "1 1 1; 0 1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn groups_file_errors_name_the_line() {
    let dir = std::env::temp_dir().join(format!("classchar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("roster.txt");
    std::fs::write(&path, "SL(2,2)\nXX(2,2)\n").unwrap();
    let o = classchar(&["roster", "--groups-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("roster.txt:2"));
    std::fs::write(&path, "SL(2,2)\nSL(2,3)\n").unwrap();
    let out = dir.join("bundle");
    let o = classchar(&["roster", "--groups-file", path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "table"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(out.join("bundle.json").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}
