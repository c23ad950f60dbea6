use std::path::PathBuf;
use std::process::{Command, Output};

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistcalc"))
        .arg("--atlas")
        .arg(data().join("atlas.json"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_all_accepts_every_shipped_script() {
    let o = run(&["check-all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("8/8 scripts accepted"));
    let v = json(&run(&["--format", "json", "check-all"]));
    assert_eq!(v["scripts"].as_array().unwrap().len(), 8);
    assert!(v["scripts"].as_array().unwrap().iter().all(|s| s["accepted"] == true && s["final_len"] == 20));
}

#[test]
fn tampered_script_fails_with_its_step_index() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data().join("s4_2.script.json")).unwrap()).unwrap();
    let k = 5;
    let result = doc["steps"][k]["result"].as_str().unwrap().to_string();
    let (first, rest) = result.split_once(' ').unwrap();
    let flipped = if let Some(c) = first.strip_suffix('\'') { c.to_string() } else { format!("{first}'") };
    doc["steps"][k]["result"] = serde_json::Value::from(format!("{flipped} {rest}"));
    let path = scratch("tampered.script.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains(&format!("step {k}")));
    let v = json(&run(&["--format", "json", "check", path.to_str().unwrap()]));
    assert_eq!(v["failing_step"], k);
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(run(&["homology", "(a1 b1", "--model", "S2_1"]).status.code(), Some(2));
    assert_eq!(run(&["homology", "a1", "--model", "nowhere"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let path = scratch("broken.script.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(run(&["check", path.to_str().unwrap()]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_twistcalc")).args(["--atlas", "/nonexistent/atlas.json", "validate-atlas"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--format", "json", "check-all"][..],
        &["--format", "json", "fibersum", "2", "1", "1"],
        &["--format", "json", "search", "(a1 b1 a2 b2)^5", "(a1 b1 a2)^4 b2 a2 b1 a1^2 b1 a2 b2", "--model", "S2_1"],
    ] {
        let (one, two) = (run(args), run(args));
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, two.stdout, "{args:?}");
    }
}

#[test]
fn invariants_of_the_hyperelliptic_word() {
    let v = json(&run(&["--format", "json", "invariants", "(c1 c2 c3 c4 c5^2 c4 c3 c2 c1)^2", "--model", "S2"]));
    assert_eq!(v["euler"], 16);
    assert_eq!(v["signature"], -12);
    assert_eq!(v["s"], 20);
    assert_eq!(v["total_space_hint"], "CP2 # 13 (-CP2)");
}

#[test]
fn other_subcommands() {
    assert_eq!(run(&["validate-atlas"]).status.code(), Some(0));
    let s41 = data().join("s4_1.script.json");
    let v = json(&run(&["--format", "json", "pi1-verify", s41.to_str().unwrap()]));
    assert_eq!(v["equal"], true);
    let v = json(&run(&["--format", "json", "homology", "c1 c2 c3 c4 c5^2 c4 c3 c2 c1", "--model", "S2"]));
    assert_eq!(v["matrix"], serde_json::json!([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]));
    let v = json(&run(&["--format", "json", "obstruction", "13", "13"]));
    assert_eq!(v["obstruction"], "contradiction");
    assert_eq!(v["bound"], 12);
    let v = json(&run(&["--format", "json", "fibersum", "1", "1", "1"]));
    assert_eq!(v["section_square"], -3);
    assert_eq!(v["invariants"]["euler"], 86);
    // Search that cannot finish within a tiny budget is a check failure.
    let o = run(&["--budget-states", "10", "search", "a1 b1", "b1 a1", "--model", "S2_1"]);
    assert_eq!(o.status.code(), Some(1));
}
