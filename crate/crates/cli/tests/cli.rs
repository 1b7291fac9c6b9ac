use std::io::Write;
use std::process::{Command, Output, Stdio};

fn llprobe(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_llprobe"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: Option<&str>) -> String {
    let out = llprobe(args, stdin);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn build_documents() {
    assert_eq!(
        ok(&["build", "twin", "--n", "2"], None).trim(),
        r#"{"kind":"twin","n":2,"entries":["5/7","11/13"]}"#
    );
    let doc = json(&ok(&["build", "binary", "--n", "3"], None));
    assert_eq!(doc["entries"], serde_json::json!(["2/3", "4/5", "16/17"]));
    let doc = json(&ok(&["build", "multiclass", "--n", "2", "--k", "3"], None));
    assert_eq!(doc["K"], 3);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn build_rejects_empty_size_as_usage_error() {
    assert_eq!(llprobe(&["build", "twin", "--n", "0"], None).status.code(), Some(2));
}

#[test]
fn build_guard_violation_is_domain_error() {
    let out = llprobe(&["build", "binary", "--n", "40"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn score_exact_and_decimal() {
    let twin3 = ok(&["build", "twin", "--n", "3"], None);
    assert_eq!(
        ok(&["score", "-", "--labels", "101"], Some(&twin3)).trim(),
        r#"{"escore":"1729/170","n":3}"#
    );
    let twin2 = ok(&["build", "twin", "--n", "2"], None);
    assert_eq!(json(&ok(&["score", "-", "--labels", "00"], Some(&twin2)))["escore"], "91/4");

    let v = r#"{"kind":"custom","n":3,"entries":["1/5","2/5","3/5"]}"#;
    assert_eq!(
        ok(&["score", "-", "--labels", "001", "--phi", "2"], Some(v)).trim(),
        r#"{"ll":"4.1e-1","auc":"1.0e0","phi":2}"#
    );

    let m = ok(&["build", "multiclass", "--n", "2", "--k", "3"], None);
    assert_eq!(json(&ok(&["score", "-", "--labels", "2,3"], Some(&m)))["escore"], "91/18");
}

#[test]
fn score_rejects_bad_labels() {
    let twin2 = ok(&["build", "twin", "--n", "2"], None);
    for labels in ["", "1", "102"] {
        let out = llprobe(&["score", "-", "--labels", labels], Some(&twin2));
        assert_eq!(out.status.code(), Some(1), "{labels:?}");
    }
}

#[test]
fn decode_examples() {
    assert_eq!(ok(&["decode", "-", "--kind", "twin"], Some(r#"{"escore":"1729/170"}"#)).trim(), "101");
    assert_eq!(
        ok(&["decode", "-", "--kind", "binary", "--n", "3"], Some(r#"{"escore":"255/32"}"#)).trim(),
        "101"
    );
    assert_eq!(
        ok(
            &["decode", "-", "--kind", "multiclass", "--n", "2", "--k", "3"],
            Some(r#"{"escore":"91/18"}"#)
        )
        .trim(),
        "2,3"
    );
}

#[test]
fn decode_failure_exits_one() {
    let out = llprobe(&["decode", "-", "--kind", "twin"], Some(r#"{"escore":"1729/171"}"#));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn score_then_decode_round_trip() {
    let x = ok(&["build", "binary", "--n", "6"], None);
    let s = ok(&["score", "-", "--labels", "011010"], Some(&x));
    assert_eq!(ok(&["decode", "-", "--kind", "binary"], Some(&s)).trim(), "011010");
    let s = ok(&["score", "-", "--labels", "011010", "--phi", "4"], Some(&x));
    assert_eq!(ok(&["decode", "-", "--kind", "binary", "--n", "6"], Some(&s)).trim(), "011010");
}

#[test]
fn oracle_serve_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let hidden = dir.path().join("hidden");
    std::fs::write(&hidden, "10\n").unwrap();
    let h = hidden.to_str().unwrap();
    let requests = concat!(
        "SCORE {\"kind\":\"twin\",\"n\":2,\"entries\":[\"5/7\",\"11/13\"]}\n",
        "SCORE {\"kind\":\"custom\",\"n\":1,\"entries\":[\"5/7\"]}\n",
        "SCORE {\n",
        "SCORE {\"kind\":\"twin\",\"n\":2,\"entries\":[\"5/7\",\"11/13\"]}\n",
        "QUIT\n",
    );
    let a = ok(&["oracle-serve", "--hidden", h], Some(requests));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "ESCORE 91/10");
    assert_eq!(lines[1], "ERR length");
    assert!(lines[2].starts_with("ERR "));
    assert_eq!(lines[3], "ESCORE 91/10");
    assert_eq!(a, ok(&["oracle-serve", "--hidden", h], Some(requests)));

    std::fs::write(&hidden, "001").unwrap();
    let req = "SCORE {\"kind\":\"custom\",\"n\":3,\"entries\":[\"1/5\",\"2/5\",\"3/5\"]}\n";
    assert_eq!(ok(&["oracle-serve", "--hidden", h, "--phi", "2"], Some(req)), "LL 4.1e-1 AUC 1.0e0\n");
}

fn demo(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["attack-demo"];
    full.extend_from_slice(args);
    json(&ok(&full, None))
}

#[test]
fn attack_demo_twin_is_exact_and_deterministic() {
    let a = demo(&["--n", "50", "--mode", "twin", "--seed", "7"]);
    assert_eq!(a["accuracy"], "1/1");
    assert_eq!(a["queries_used"], 1);
    assert_eq!(a, demo(&["--n", "50", "--mode", "twin", "--seed", "7"]));
    assert_eq!(a, demo(&["--n", "50", "--mode", "twin", "--seed", "7", "--via-process"]));
}

#[test]
fn attack_demo_binary_via_process() {
    let a = demo(&["--n", "20", "--mode", "binary", "--seed", "3", "--via-process"]);
    assert_eq!(a["accuracy"], "1/1");
    assert_eq!(a["queries_used"], 1);
}

#[test]
fn attack_demo_fixed_recovers_everything() {
    let a = demo(&["--n", "12", "--mode", "fixed", "--phi", "1"]);
    assert_eq!(a["accuracy"], "1/1");
    let b = demo(&["--n", "12", "--mode", "fixed", "--phi", "1", "--via-process"]);
    assert_eq!(a, b);
}

#[test]
fn attack_demo_fixed_phi1_n12_within_two_queries() {
    let a = demo(&["--n", "12", "--mode", "fixed", "--phi", "1"]);
    assert_eq!(a["accuracy"], "1/1");
    assert!(a["queries_used"].as_u64().unwrap() <= 2, "{a}");
}

#[test]
fn attack_demo_fixed_phi15_n100_within_two_queries() {
    let a = demo(&["--n", "100", "--mode", "fixed", "--phi", "15"]);
    assert_eq!(a["accuracy"], "1/1");
    assert!(a["queries_used"].as_u64().unwrap() <= 2, "{a}");
}

#[test]
fn attack_demo_argument_errors() {
    assert_eq!(llprobe(&["attack-demo", "--n", "5", "--mode", "fixed"], None).status.code(), Some(1));
    assert_eq!(llprobe(&["attack-demo", "--n", "5", "--mode", "warp"], None).status.code(), Some(2));
}

#[test]
fn plan_documents() {
    let p = json(&ok(&["plan", "--delta", "0.002", "--n", "100"], None));
    assert_eq!(p["phi"], 3);
    assert_eq!(p["query_bound"], 6);
    let p = json(&ok(&["plan", "--phi", "15", "--n", "100"], None));
    assert_eq!(p["queries"], 2);
    let p = json(&ok(&["plan", "--phi", "1", "--n", "6"], None));
    assert_eq!(p["batches"].as_array().unwrap().len(), 1);
    assert_eq!(p["max_unique_batch"], 6);
}

#[test]
fn plan_needs_exactly_one_precision() {
    assert_eq!(llprobe(&["plan", "--n", "6"], None).status.code(), Some(2));
    assert_eq!(
        llprobe(&["plan", "--n", "6", "--phi", "1", "--delta", "0.2"], None).status.code(),
        Some(2)
    );
}

#[test]
fn realized_plan_covers_dataset() {
    let p = json(&ok(&["plan", "--phi", "2", "--n", "10", "--realize"], None));
    let batches = p["batches"].as_array().unwrap();
    assert_eq!(batches.first().unwrap()["first"], 1);
    assert_eq!(batches.last().unwrap()["last"], 10);
    assert_eq!(p["queries"].as_u64().unwrap() as usize, batches.len());
}
