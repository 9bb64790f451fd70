use std::fs;
use std::process::Command;

use mfact_cli::{exit, run};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mfact").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = call(&full);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out:?} {err}"));
    (code, v)
}

const SMALL_VERIFY: &[&str] = &[
    "verify",
    "--kmax",
    "20",
    "--nmax",
    "20",
    "--ymax",
    "50",
    "--hmax",
    "50",
    "--pmax",
    "50",
    "--alpha-sum",
    "5",
];

#[test]
fn f_with_list() {
    let (code, v) = json(&["f", "18", "--list"]);
    assert_eq!(code, exit::OK);
    assert_eq!(v["f"], "4");
    let lists: Vec<Vec<u64>> = serde_json::from_value(v["factorizations"].clone()).unwrap();
    assert_eq!(lists, vec![vec![2, 3, 3], vec![2, 9], vec![3, 6], vec![18]]);

    let (_, text, _) = call(&["f", "18", "--list"]);
    assert!(text.contains("2·9"));
}

#[test]
fn small_counts() {
    assert_eq!(json(&["pvec", "2", "1"]).1["p"], "4");
    assert_eq!(
        json(&["pvec", "1", "2"]).1["alpha"],
        serde_json::json!([1, 2])
    );
    assert_eq!(json(&["pvec", "1", "1", "1", "1"]).1["p"], "15");
    assert_eq!(json(&["partition", "100"]).1["p"], "190569292");
    assert_eq!(json(&["bell", "10"]).1["bell"], "115975");
    assert_eq!(json(&["f", "1"]).1["f"], "1");
}

#[test]
fn bound_report() {
    let (code, v) = json(&["bound", "5"]);
    assert_eq!(code, exit::OK);
    assert_eq!(v["n_floor"], 2);
    assert_eq!(v["exact_p"], "7");
    assert_eq!(v["status"], "PASS");

    let (code, v) = json(&["bound", "1", "1", "1"]);
    assert_eq!(code, exit::OK);
    assert_eq!(v["equality_case"], true);
}

#[test]
fn usage_errors_exit_3() {
    for args in [
        &["f", "0"][..],
        &["pvec"],
        &["pvec", "0", "1"],
        &["bell", "-1"],
        &["spectrum", "0"],
        &["spectrum", "ten"],
        &["conjecture", "5"],
        &["nonsense"],
        &["--tail-tol", "-1", "bell", "3"],
        &["--precision-cap", "64", "bell", "3"],
        &["verify", "--kmax", "0"],
    ] {
        let (code, _, err) = call(args);
        assert_eq!(code, exit::USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_and_version_exit_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("spectrum"));
    assert_eq!(call(&["--version"]).0, exit::OK);
}

#[test]
fn resource_limits_exit_4() {
    let (code, _, err) = call(&["spectrum", "10000", "--max-nodes", "5"]);
    assert_eq!(code, exit::RESOURCE, "{err}");
    let (code, _, _) = call(&["--state-budget", "3", "pvec", "4", "4", "4"]);
    assert_eq!(code, exit::RESOURCE);
    let (code, _, _) = call(&["partition", "10000000"]);
    assert_eq!(code, exit::RESOURCE);
}

#[test]
fn small_verify_passes() {
    let (code, v) = json(SMALL_VERIFY);
    assert_eq!(code, exit::OK);
    assert_eq!(v["status"], "PASS");
    let ids: Vec<&str> = v["lemmas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["lemma_id"].as_str().unwrap())
        .collect();
    assert_eq!(
        ids,
        [
            "H_MONOTONE",
            "FACT_BOUND",
            "BINOM_BOUND",
            "MAXP",
            "P_UPPER",
            "P_LOWER",
            "SANDWICH",
            "EQ7",
            "EQ5"
        ]
    );
    assert!(v["bounds"].as_array().unwrap().len() > 5);

    let (code, _, _) = call(&[
        "verify",
        "--kmax",
        "1",
        "--nmax",
        "1",
        "--ymax",
        "1",
        "--hmax",
        "1",
        "--pmax",
        "1",
        "--alpha-sum",
        "1",
    ]);
    assert_eq!(code, exit::OK);
}

#[test]
fn injected_fault_is_reported() {
    let mut args = SMALL_VERIFY.to_vec();
    args.extend(["--inject-fault", "shrink-pi"]);
    let (code, v) = json(&args);
    assert_eq!(code, exit::FAIL);
    assert_eq!(v["status"], "FAIL");
    let failed: Vec<&Value> = v["lemmas"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["status"] == "FAIL")
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|l| l["counterexample"].is_string()));
}

#[test]
fn csv_matches_json() {
    let (_, v) = json(&["spectrum", "100"]);
    let (code, csv, _) = call(&["--format", "csv", "spectrum", "100"]);
    assert_eq!(code, exit::OK);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(lines.next().is_none());
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("distinct_count"), v["distinct_count"].to_string());
    assert_eq!(col("tuple_count"), v["tuple_count"].to_string());
    let values: Vec<&str> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(col("values"), values.join(";"));

    let (code, csv, _) = call(&["--format", "csv", "bound", "2", "3"]);
    assert_eq!(code, exit::OK);
    assert!(csv.starts_with("alpha,z.lo,z.hi,z.precision_bits,n_floor"));
}

#[test]
fn worker_count_does_not_change_output() {
    let a = call(&["--format", "json", "--workers", "1", "spectrum", "3000"]);
    let b = call(&["--format", "json", "--workers", "4", "spectrum", "3000"]);
    assert_eq!(a, b);
    let mut one = vec!["--format", "json", "--workers", "1"];
    one.extend_from_slice(SMALL_VERIFY);
    let mut four = vec!["--format", "json", "--workers", "4"];
    four.extend_from_slice(SMALL_VERIFY);
    assert_eq!(call(&one), call(&four));
}

#[test]
fn cache_is_written_reused_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.cache");
    let p = path.to_str().unwrap();

    let (code, first, _) = call(&["--cache", p, "spectrum", "500"]);
    assert_eq!(code, exit::OK);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("VPCACHE v1\n"));
    assert!(text.lines().count() > 20);

    let (code, second, _) = call(&["--cache", p, "spectrum", "500"]);
    assert_eq!(code, exit::OK);
    assert_eq!(first, second);
    assert_eq!(fs::read_to_string(&path).unwrap(), text);

    fs::write(&path, "VPCACHE v2\n").unwrap();
    let (code, _, err) = call(&["--cache", p, "pvec", "2"]);
    assert_eq!(code, exit::RESOURCE);
    assert!(err.contains("VPCACHE"));

    fs::write(&path, "VPCACHE v1\n2\t99\n").unwrap();
    let (code, _, err) = call(&["--cache", p, "pvec", "2"]);
    assert_eq!(code, exit::RESOURCE, "{err}");

    fs::write(&path, "VPCACHE v1\n2 2\n").unwrap();
    let (code, _, _) = call(&["--cache", p, "pvec", "2"]);
    assert_eq!(code, exit::RESOURCE);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_mfact"))
        .args(["f", "12"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains('4'));

    let out = Command::new(env!("CARGO_BIN_EXE_mfact"))
        .args(["f", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::USAGE));
}
