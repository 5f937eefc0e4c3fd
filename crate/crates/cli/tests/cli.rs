use std::process::{Command, Output};

fn extlab(args: &[&str], cache: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extlab"))
        .args(args)
        .env("EXTLAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

#[test]
fn resolve_of_a_is_a_single_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(&["resolve", "--module", "a", "--max-s", "4", "--max-t", "10"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(" | ")).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows.iter().map(|r| r.split(" | ").nth(1).unwrap().matches('1').count()).sum::<usize>(), 1);
    assert!(text.lines().any(|l| l == "  0 | 1 . . . . . . . . . ."));
}

#[test]
fn scenario_json_is_versioned() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(
        &["scenario", "--kind", "fnz", "--n", "4", "--max-s", "6", "--max-t", "14", "--format", "json"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["scenario"], "F_4Z");
    assert_eq!(v["verified"], true);
    assert_eq!(v["diff"]["entries"].as_array().unwrap().len(), 0);
    let key = |c: &serde_json::Value| -> Vec<(u64, u64, u64)> {
        c["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| (e["stem"].as_u64().unwrap(), e["filtration"].as_u64().unwrap(), e["dim"].as_u64().unwrap()))
            .collect()
    };
    assert_eq!(key(&v["assembled"]), key(&v["expected"]));
    assert!(key(&v["assembled"]).contains(&(3, 1, 1)));
}

#[test]
fn svg_goes_to_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("charts/f.svg");
    let out = extlab(
        &[
            "scenario", "--kind", "f", "--max-s", "6", "--max-t", "16", "--format", "svg", "--output",
            path.to_str().unwrap(),
        ],
        &dir.path().join("cache"),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains("<title>stem 7, filtration 1, dim 1"));
}

#[test]
fn cache_dir_flag_and_no_cache() {
    let dir = tempfile::tempdir().unwrap();
    let flag_dir = dir.path().join("flag");
    let env_dir = dir.path().join("env");
    let args = ["resolve", "--module", "f2", "--max-s", "3", "--max-t", "8"];
    let mut with_flag = args.to_vec();
    with_flag.extend(["--cache-dir", flag_dir.to_str().unwrap()]);
    assert!(extlab(&with_flag, &env_dir).status.success());
    assert_eq!(std::fs::read_dir(&flag_dir).unwrap().count(), 1);
    assert!(!env_dir.exists());
    assert!(extlab(&args, &env_dir).status.success());
    assert_eq!(std::fs::read_dir(&env_dir).unwrap().count(), 1);
    let other = dir.path().join("none");
    let mut no_cache = args.to_vec();
    no_cache.push("--no-cache");
    assert!(extlab(&no_cache, &other).status.success());
    assert!(!other.exists());
}

#[test]
fn verify_report_lists_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = extlab(&["verify", "--suite", "resolution"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["suites"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.contains("oracle")));
}
