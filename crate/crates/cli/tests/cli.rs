use std::process::{Command, Output};

fn gkplat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkplat")).args(args).env_remove("GKPLAT_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn analyze_reports() {
    let v = json(&gkplat(&["analyze", "square", "--distance", "--json"]));
    assert!((v["distance"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["logical_dim"], 2);

    let text = stdout(&gkplat(&["analyze", "surface17", "--bounds", "--css", "--standard-form"]));
    assert!(text.contains("bounds (all hold)"), "{text}");
    assert!(text.contains("standard form D = [2, 1, 1, 1, 1, 1, 1, 1, 1]"));
    assert!(text.contains("CSS: Δ_q = 1.22474487, Δ_p = 1.22474487"));

    let text = stdout(&gkplat(&["analyze", "square", "--equivalent", "hexagonal"]));
    assert!(text.contains("equivalent, D=(2)"), "{text}");
    let v = json(&gkplat(&["analyze", "sensor", "--distance", "--json"]));
    assert!(v["distance"].is_null());

    let text = stdout(&gkplat(&["analyze", "hexagonal", "--theta", "3"]));
    assert!(text.contains("theta series up to 3"));
}

#[test]
fn build_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s17.json");
    let f = file.to_str().unwrap();
    let text = stdout(&gkplat(&["build", "concat", "--qubit", "surface17", "--out", f]));
    assert!(text.starts_with("concat-9: n = 9, d = 2"), "{text}");
    let v = json(&gkplat(&["analyze", f, "--distance", "--json"]));
    assert!((v["distance"].as_f64().unwrap() - 1.5f64.sqrt()).abs() < 1e-9);

    let text = stdout(&gkplat(&["build", "tensor", "--left", "square", "--right", "[[2]]"]));
    assert!(text.lines().next().unwrap().contains("d = 8, k = 3.000000"), "{text}");

    let text = stdout(&gkplat(&["build", "scaled", "--seed", "hexagonal", "--lambda", "4"]));
    assert!(text.contains("d = 4"), "{text}");
    let odd = gkplat(&["build", "scaled", "--seed", "square", "--lambda", "3"]);
    assert_eq!(odd.status.code(), Some(2));
    let text = stdout(&gkplat(&["build", "scaled", "--seed", "square", "--lambda", "3", "--qudit"]));
    assert!(text.contains("d = 3"));

    let s = 0.5f64.sqrt().to_string();
    let glue = format!("{s},0,{s},0");
    let text = stdout(&gkplat(&["build", "glue", "--component", "square", "--component", "square", "--glue", &glue]));
    assert!(text.starts_with("glued: n = 2, d = 2"), "{text}");
}

#[test]
fn decode_outputs() {
    let v = json(&gkplat(&["decode", "square", "--syndrome", "0,0"]));
    assert_eq!(v["correction"], serde_json::json!([0.0, 0.0]));
    let v = json(&gkplat(&["decode", "square", "--error", "0.45,0"]));
    assert_eq!(v["logical_failure"], true);
    let v = json(&gkplat(&["decode", "square", "--error", "0.1,0"]));
    assert_eq!(v["logical_failure"], false);
    let v = json(&gkplat(&["decode", "rep3", "--error", "0.1,0,0,0,0.05,0", "--decoder", "two-step", "--sigma", "0.2"]));
    assert_eq!(v["logical_failure"], false);
    assert_eq!(v["decoder"], "two-step");
    let v = json(&gkplat(&["decode", "hexagonal", "--error", "0.1,0.1", "--decoder", "mld", "--sigma", "0.2"]));
    assert_eq!(v["coset_scores"].as_array().unwrap().len(), 4);
}

#[test]
fn simulate_is_deterministic_across_threads() {
    let base = ["simulate", "rep3", "--decoder", "med", "--sigma-grid", "0.2:0.4:3", "--trials", "2000", "--seed", "5"];
    let one = stdout(&gkplat(&[&base[..], &["--threads", "1"]].concat()));
    let three = stdout(&gkplat(&[&base[..], &["--threads", "3"]].concat()));
    assert_eq!(one, three);
    let env = Command::new(env!("CARGO_BIN_EXE_gkplat")).args(base).env("GKPLAT_THREADS", "2").output().unwrap();
    assert_eq!(one, stdout(&env));
    let mut lines = one.lines();
    assert!(lines.next().unwrap().starts_with("code,decoder,sigma_tilde"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(gkplat(&["analyze", "/nonexistent/code.json"]).status.code(), Some(2));
    assert_eq!(gkplat(&["decode", "square", "--syndrome", "0.1"]).status.code(), Some(2));
    let degenerate = gkplat(&["decode", "square", "--syndrome", "0,0", "--decoder", "mld", "--sigma", "1e-5"]);
    assert_eq!(degenerate.status.code(), Some(3));
    let budget = gkplat(&[
        "simulate", "surface17", "--decoder", "mld", "--sigma-grid", "0.5", "--trials", "2", "--max-decoder-errors", "0",
    ]);
    assert_eq!(budget.status.code(), Some(3), "{}", String::from_utf8_lossy(&budget.stderr));
}
