use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn weylbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylbox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn record(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("one record")).expect("json record")
}

#[test]
fn count_closed_form() {
    let out = weylbox(&["count", "--s", "2", "--d", "2", "--N", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = record(&out);
    assert_eq!(r["payload"]["count"], 19900);
    assert!(r["version"].as_str().unwrap().starts_with("weylbox"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("19900"));
}

#[test]
fn bounds_csv_has_five_breakpoints() {
    let out = weylbox(&["bounds", "--source", "cor3.6", "--s", "2", "--d", "2", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "label,tau,kappa,tau_exact,kappa_exact");
    assert_eq!(lines.len(), 6);
    assert!(lines[2].contains(",1/2,1"));
}

#[test]
fn plotdata_labels() {
    let out = weylbox(&["plotdata", "--figure", "3.1", "--emit", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"Cor. 3.6, kappa^(0)_{2,2}\""));
    assert!(text.contains("\"D-L, kappa^(0)_{2,2}\""));
}

#[test]
fn usage_and_budget_exit_codes() {
    assert_eq!(weylbox(&["count", "--s", "2", "--d", "2"]).status.code(), Some(1));
    assert_eq!(weylbox(&["frobnicate"]).status.code(), Some(1));
    let bad_delta = weylbox(&["integrate", "--s", "1", "--d", "1", "--N", "8", "--delta", "1.5"]);
    assert_eq!(bad_delta.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_delta.stderr).contains("delta"));
    let bad_const = weylbox(&["witness", "--s", "2", "--d", "2", "--N", "64", "--delta", "1", "--const", "zeta=2"]);
    assert_eq!(bad_const.status.code(), Some(1));
    let budget = weylbox(&["count", "--s", "6", "--d", "2", "--N", "500", "--mem-budget", "1000"]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(weylbox(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "count", "s": 2, "d": 2, "N": 50}"#).unwrap();
    let out = weylbox(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(record(&out)["payload"]["count"], 2 * 2500 - 50);
    let out = weylbox(&["count", "--config", cfg.to_str().unwrap(), "--N", "30"]);
    assert_eq!(record(&out)["payload"]["count"], 2 * 900 - 30);
}

#[test]
fn cache_hits_agree_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().to_str().unwrap();
    let args = ["count", "--s", "2", "--d", "2", "--N", "40", "--delta", "0.2", "--cache", c];
    let first = record(&weylbox(&args));
    let second = record(&weylbox(&args));
    assert_eq!(first["payload"]["cached"], false);
    assert_eq!(second["payload"]["cached"], true);
    assert_eq!(first["payload"]["count"], second["payload"]["count"]);
    let mut again = args.to_vec();
    again.push("--recompute");
    assert_eq!(weylbox(&again).status.code(), Some(0));

    let csv = dir.path().join("counts.csv");
    let text = fs::read_to_string(&csv).unwrap();
    let n = first["payload"]["count"].as_u64().unwrap();
    fs::write(&csv, text.replace(&n.to_string(), &(n + 1).to_string())).unwrap();
    assert_eq!(weylbox(&again).status.code(), Some(2));
}

#[test]
fn payloads_do_not_depend_on_threads() {
    for args in [
        vec!["integrate", "--s", "2", "--d", "2", "--N", "24", "--delta", "0.3", "--xi", "0.1,0.7"],
        vec!["witness", "--s", "2", "--d", "2", "--N", "256", "--delta", "0.5", "--samples", "300"],
        vec!["levelset", "--d", "2", "--N", "128", "--A", "20", "--delta", "0.5", "--samples", "5000"],
    ] {
        let mut one = args.clone();
        one.extend(["--threads", "1"]);
        let mut four = args.clone();
        four.extend(["--threads", "4"]);
        let a = record(&weylbox(&one))["payload"].to_string();
        let b = record(&weylbox(&four))["payload"].to_string();
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn out_file_is_append_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("runs.jsonl");
    let ps = p.to_str().unwrap();
    for n in ["10", "20"] {
        let out = weylbox(&["count", "--s", "1", "--d", "1", "--N", n, "--out", ps]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = fs::read_to_string(&p).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["payload"]["count"], 10);
    assert_eq!(lines[1]["payload"]["count"], 20);
}

#[test]
fn structure_fieldscan_and_verify() {
    let out = weylbox(&["structure", "--N", "1000", "--A", "300", "--x", "0.2857142857142857,0.42857142857142855"]);
    assert_eq!(record(&out)["payload"]["report"]["witness"]["q"], 7);

    let out = weylbox(&["fieldscan", "--d", "2", "--p", "7", "--gamma", "1"]);
    assert_eq!(record(&out)["payload"]["count"], 43);

    let out = weylbox(&["fieldscan", "--d", "2", "--p", "31", "--curve", "1,1", "--side", "31", "--corner", "0,0"]);
    assert_eq!(record(&out)["payload"]["count"], 30);

    let out = weylbox(&["fieldscan", "--d", "2", "--p", "31", "--gauss-at", "3,7", "--N", "200", "--samples", "50"]);
    assert!(record(&out)["payload"]["ratio_at_rational"].as_f64().unwrap() > 0.5);

    let out = weylbox(&["verify", "--only", "6,7,8", "--emit", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(",true,true,")).count(), 3);
}
