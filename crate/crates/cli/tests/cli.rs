use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubicsing")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_bundled_scenarios() {
    let o = run(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "3d4"));
    assert_eq!(out.lines().count(), 24);
}

#[test]
fn verify_scenario_passes() {
    let o = run(&["verify-scenario", "3d4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], 1);
}

#[test]
fn failing_verdict_exits_with_one() {
    let mut v: serde_json::Value = serde_json::from_str(include_str!("../../core/data/scenarios/2a2.json")).unwrap();
    v["points"][0]["type"] = "A3".into();
    let path = std::env::temp_dir().join(format!("cubicsing-cli-{}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["verify-scenario", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_scenario_exits_with_two() {
    let o = run(&["verify-scenario", "no_such_scenario"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bundled"));
}

#[test]
fn classify_single_point() {
    let o = run(&["classify", "--cubic", "x1*x2*x3 + x1*x4^2 + x2*x5^2 + x3^3 + x4^3 + x5^3", "--point", "1,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A2"));
}

#[test]
fn classify_over_cyclotomic_field() {
    let o = run(&["classify", "3d4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("\"D4\"").count(), 6);
}

#[test]
fn cohomology_reports_obstruction() {
    let o = run(&["cohomology", "3d4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Z/3"));
}

#[test]
fn defect_command() {
    let o = run(&["defect", "2a5_b0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["defect"], 1);
}

#[test]
fn scan_requires_primes_for_raw_cubic() {
    let o = run(&["scan-modp", "--cubic", "x1^3 + x2^3 + x3^3 + x4^3 + x5^3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["scan-modp", "--cubic", "x1*x2*x3 + x1*x4^2 + x2*x5^2 + x3^3 + x4^3 + x5^3", "--primes", "5,7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["5"].as_array().unwrap().len(), 2);
}

#[test]
fn degeneration_graph_dot() {
    let o = run(&["degeneration-graph"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("digraph"));
    assert!(out.contains("->"));
    let o = run(&["degeneration-graph", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_field_is_an_error() {
    let o = run(&["classify", "--cubic", "x1^3", "--point", "1,0,0,0,0", "--field", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_writes_file() {
    let path = std::env::temp_dir().join(format!("cubicsing-report-{}.md", std::process::id()));
    let o = run(&["report", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0));
    assert!(text.contains("H1 obstructions"));
    assert!(text.contains("3d4"));
}
