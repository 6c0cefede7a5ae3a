use std::process::{Command, Output};

fn liarsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liarsearch")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn bounds_for_uniform_eight() {
    let out = liarsearch(&["bounds", "--gen", "uniform:8", "-k", "0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entropy"], 3.0);
    assert!(v["lower_bound"].as_f64().unwrap() >= 2.0);
}

#[test]
fn bounds_for_point_mass() {
    let out = liarsearch(&["bounds", "--gen", "point", "--format", "csv"]);
    assert!(stdout(&out).contains("entropy,0.0000000000000000e0"));
}

#[test]
fn search_is_byte_deterministic() {
    let args = ["search", "--gen", "geometric:12,1/3", "-k", "1", "--trials", "25", "--seed", "9", "--adversary", "random-alpha:seed=4"];
    let a = liarsearch(&args);
    let b = liarsearch(&[&args[..], &["--workers", "3"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 26);
}

#[test]
fn zero_trials_gives_header_only() {
    let out = liarsearch(&["search", "--gen", "uniform:4", "--trials", "0"]);
    assert_eq!(stdout(&out), "trial,questions,lies,output_correct,max_depth,jump_backs,V\n");
}

#[test]
fn out_directory_holds_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let out = liarsearch(&["sort", "--n", "6", "-k", "1", "--trials", "4", "--adversary", "schedule:2", "--out", path]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sort.csv")).unwrap();
    assert!(csv.starts_with("trial,comparisons,lies_used,correct\n"));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",true")).count(), 4);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sort_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["correct"], 4);
    assert_eq!(summary["seed_rule"], "trial seed = base seed XOR trial index");
}

#[test]
fn verify_exit_codes() {
    let ok = liarsearch(&["verify", "--gen", "uniform:4", "-k", "1", "--trials", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["valid_runs"], 20);
    let algo1 = liarsearch(&["verify", "--gen", "uniform:4", "-k", "0", "--algo", "1", "--trials", "5"]);
    assert_eq!(algo1.status.code(), Some(0));
    let broken = liarsearch(&["verify", "--gen", "uniform:8", "-k", "2", "--trials", "2", "--debug-radius", "1"]);
    assert_eq!(broken.status.code(), Some(2));
}

#[test]
fn oracle_and_guards() {
    let out = liarsearch(&["oracle", "--n", "2", "-k", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["optimum"].as_u64(), v["packing_threshold"].as_u64()), (Some(3), Some(3)));
    assert_eq!(liarsearch(&["oracle", "--n", "7"]).status.code(), Some(3));
    let budget = liarsearch(&["verify", "--gen", "uniform:8", "-k", "2", "--fork-budget", "10"]);
    assert_eq!(budget.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(liarsearch(&["search"]).status.code(), Some(1));
    assert_eq!(liarsearch(&["search", "--gen", "uniform:0"]).status.code(), Some(1));
    assert_eq!(liarsearch(&["search", "--gen", "uniform:4", "--algo", "3"]).status.code(), Some(1));
    assert_eq!(liarsearch(&["search", "--gen", "uniform:4", "--adversary", "schedule:1,2"]).status.code(), Some(1));
    assert_eq!(liarsearch(&["--help"]).status.code(), Some(0));
}

#[test]
fn mismatched_prior_file() {
    let dir = tempfile::tempdir().unwrap();
    let prior = dir.path().join("eta.json");
    std::fs::write(&prior, r#"{"probs": ["1/12", "5/12", "1/4", "1/4"]}"#).unwrap();
    let out = liarsearch(&["search", "--gen", "uniform:4", "--prior-file", prior.to_str().unwrap(), "--trials", "5", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["summary"]["bounds"]["kl_divergence"].as_f64().unwrap() > 0.1);
}
