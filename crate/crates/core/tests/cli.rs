use std::process::{Command, Output};

fn nildyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nildyn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn validate_group_builtin() {
    let o = nildyn(&["validate-group", "--spec", "heisenberg3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: PASS"));
}

#[test]
fn validate_group_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("h.json");
    std::fs::write(&good, nildyn::nilgroup::NilGroupSpec::heisenberg3().to_json()).unwrap();
    assert_eq!(nildyn(&["validate-group", "--spec", good.to_str().unwrap()]).status.code(), Some(0));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dimension\": 2}").unwrap();
    assert_eq!(nildyn(&["validate-group", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn complexity_rotation_is_bounded() {
    let o = nildyn(&["complexity", "--system", "rotation:alpha=0.618", "--eps", "0.1", "--n-max", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# fit: bounded"), "{text}");
    assert!(text.contains("# nildyn "));
    assert!(text.contains("\"system\":\"rotation:alpha=0.618\""));
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "n,r_estimate,net_size,grid");
    assert_eq!(data.len(), 15);
}

#[test]
fn ip_search_sturmian_exhausts() {
    let o = nildyn(&["ip-search", "--system", "sturmian:alpha=golden", "--m", "4", "--bound", "50", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["result"]["rows"][0]["result"]["status"], "Exhausted");
    assert!(v["result"]["rows"][0].get("wall_time_s").is_none());
}

#[test]
fn timing_flag_adds_wall_time() {
    let o = nildyn(&["ip-search", "--system", "fullshift:L=4", "--m", "2", "--bound", "3", "--seed", "1", "--timing"]);
    assert!(json(&o)["result"]["rows"][0]["wall_time_s"].is_number());
}

#[test]
fn usage_errors() {
    assert_eq!(nildyn(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(nildyn(&[]).status.code(), Some(64));
    assert_eq!(nildyn(&["--help"]).status.code(), Some(0));
    assert_eq!(nildyn(&["complexity", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_and_precondition_errors() {
    // seed is mandatory for searches
    let o = nildyn(&["rp-test", "--system", "rotation", "--x", "0.1", "--y", "0.4", "--delta", "0.05"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(nildyn(&["simulate", "--system", "klein"]).status.code(), Some(2));
    assert_eq!(nildyn(&["simulate", "--system", "rotation", "--start", "0.1;0.2"]).status.code(), Some(2));
    assert_eq!(nildyn(&["complexity", "--system", "rotation", "--grid", "10"]).status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_nildyn"))
        .args(["validate-group"])
        .env("NILDYN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn budget_exits() {
    let o = nildyn(&[
        "rp-test", "--system", "rotation", "--x", "0.1", "--y", "0.4", "--delta", "0.05", "--seed", "1",
        "--max-n-values", "100", "--max-candidates", "50",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["result"]["status"], "not_found");
    assert_eq!(json(&o)["result"]["label"], "budget-exhausted");
    let o = nildyn(&["complexity", "--system", "skew", "--max-points", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "system = \"rotation:alpha=golden\"\nseed = 4\n[simulate]\nsteps = 5\nstart = \"0.25\"\n",
    )
    .unwrap();
    let o = nildyn(&["simulate", "--config", cfg.to_str().unwrap(), "--steps", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, vec!["n,x0", "0,0.25000000000000000", "1,0.86803398874989490", "2,0.48606797749978981"]);
    assert!(text.contains("\"steps\":2"));

    std::fs::write(&cfg, "[simulate]\ncolour = 1\n").unwrap();
    assert_eq!(nildyn(&["simulate", "--config", cfg.to_str().unwrap(), "--system", "rotation"]).status.code(), Some(2));
}

#[test]
fn probe_and_traces() {
    let o = nildyn(&["averages", "--system", "rotation", "--probe", "--n-max", "100000", "--seed", "1"]);
    let v = json(&o);
    assert!(v["result"]["max_spread"].as_f64().unwrap() <= 0.01);
    assert!(v["result"]["verdict"].as_str().unwrap().starts_with("consistent"));
    let o = nildyn(&["averages", "--system", "skew", "--observable", "const:1", "--start", "0.1;0.2", "--n-max", "8"]);
    let text = stdout(&o);
    assert!(text.contains("const(1),0.10000000000000001;0.20000000000000001,8,1"), "{text}");
}

#[test]
fn ind_check_fullshift_powers_of_two() {
    let o = nildyn(&["ind-check", "--system", "fullshift:L=300", "--gens", "1,2,4,8,16,32,64,128", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["result"]["verified"], true);
    assert_eq!(v["result"]["method"], "exact-language");
}
