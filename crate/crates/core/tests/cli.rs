use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cobarlie"))
        .args(args)
        .env("COBARLIE_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn verify_passes_and_detects_flipped_sign() {
    let ok = run(&["verify", "-N", "6", "--pq-max", "6"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["all_pass"], true);

    let bad = run(&["verify", "-N", "4", "--pq-max", "4", "--debug-flip-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = json(&bad);
    let w2 = report["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["identity"] == "w_n^2 = n w_n")
        .unwrap();
    assert_eq!(w2["pass"], false);
    assert!(w2["counterexample"].as_str().unwrap().starts_with("n=3"));

    let tiny = run(&["verify", "-N", "1", "--pq-max", "2"]);
    assert_eq!(tiny.status.code(), Some(0));
}

#[test]
fn homotopy_is_deterministic_and_refuses_bad_windows() {
    let args = ["homotopy", "--space", "S2", "-N", "3", "-T", "3", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["ranks"], serde_json::json!({"1": 1, "2": 1, "3": 0}));
    assert_eq!(r["q_max"], 7);

    let refused = run(&["homotopy", "--space", "S2", "-N", "3", "-T", "4"]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("window"));

    let low_q = run(&["homotopy", "--space", "S2", "-N", "3", "-T", "3", "--qmax", "5"]);
    assert_eq!(low_q.status.code(), Some(2));
}

#[test]
fn budget_exit_code() {
    let out = run(&["homotopy", "--space", "S2", "-N", "3", "-T", "3", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bar_and_compare() {
    let trivial = run(&["bar", "--cdga", "trivial", "-N", "3"]);
    assert_eq!(trivial.status.code(), Some(0));
    let r = json(&trivial);
    assert!(r["ranks"].as_object().unwrap().values().all(|v| v == 0));

    let s2 = json(&run(&["bar", "--cdga", "H(S2)", "-N", "4", "-T", "3"]));
    assert_eq!(s2["ranks"], serde_json::json!({"1": 1, "2": 1, "3": 0}));

    let cmp = run(&["compare", "--space", "S2vS2", "--cdga", "H(S2vS2)", "-N", "3", "-T", "2"]);
    assert_eq!(cmp.status.code(), Some(0));
    let c = json(&cmp);
    assert_eq!(c["match"], true);
    assert_eq!(c["bar_ranks"], serde_json::json!({"1": 2, "2": 3}));
}

#[test]
fn invalid_algebra_names_the_law() {
    let dir = std::env::temp_dir().join(format!("cobarlie-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"generators":[{"name":"a","degree":2},{"name":"b","degree":4}],
            "relations":[{"left":"a","right":"a","result":{"b":"1"}},
                         {"left":"a","right":"b","result":{}}],
            "differential":{"a":{"b":"1"}}}"#,
    )
    .unwrap();
    let out = run(&["bar", "--cdga", path.to_str().unwrap(), "-N", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differential degree"));

    let unknown = run(&["compare", "--space", "S2", "--cdga", "H(T2)", "-N", "3", "-T", "2"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn show_round_trips_through_files() {
    let dir = std::env::temp_dir().join(format!("cobarlie-show-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let space = dir.join("s2.json");
    let out = run(&["show", "--space", "S2", "--out", space.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let again = run(&["homotopy", "--space", space.to_str().unwrap(), "-N", "2", "-T", "2"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(json(&again)["ranks"], serde_json::json!({"1": 1, "2": 1}));

    let alg = dir.join("a.json");
    run(&["show", "--cdga", "H(S2xS2)", "--out", alg.to_str().unwrap()]);
    let bar = run(&["bar", "--cdga", alg.to_str().unwrap(), "-N", "3", "-T", "2"]);
    assert_eq!(bar.status.code(), Some(0));
}
