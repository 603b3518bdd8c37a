use std::path::Path;
use std::process::{Command, Output};

fn sandpile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandpile")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn enumerate_two_by_two_box() {
    let o = sandpile(&["enumerate", "--d", "2", "--box", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for line in ["sites 4", "recurrent 192", "trees 192", "det 192", "agree true"] {
        assert!(text.lines().any(|l| l == line), "missing {line:?} in {text}");
    }
}

#[test]
fn enumerate_lists_configurations() {
    let o = sandpile(&["enumerate", "--d", "1", "--box", "3", "--list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    // a path of 3 sites has det [[2,-1,0],[-1,2,-1],[0,-1,2]] = 4
    assert!(text.contains("recurrent 4\n"));
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(',')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.contains(&"1,1,1"));
}

#[test]
fn roundtrip_reports_every_trial_identical() {
    let o = sandpile(&["bijection", "--roundtrip", "--ball", "5", "--k", "2", "--seed", "3", "--trials", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "300/300 identical\n");
}

#[test]
fn forward_and_inverse_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let heights = dir.path().join("eta.json");
    let tree = dir.path().join("tree.json");
    let back = dir.path().join("back.json");
    let path = |p: &Path| p.to_str().unwrap().to_string();
    let run = |args: &[&str]| {
        let o = sandpile(args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    };
    run(&["sample-sandpile", "--ball", "4", "--k", "2", "--seed", "17", "--out", &path(&heights)]);
    run(&["bijection", "--forward", "--k", "2", "--input", &path(&heights), "--out", &path(&tree)]);
    run(&["bijection", "--inverse", "--k", "2", "--input", &path(&tree), "--out", &path(&back)]);
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&heights).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&back).unwrap()).unwrap();
    assert_eq!(a["heights"], b["heights"]);
    assert_eq!(a["region"], b["region"]);
}

#[test]
fn samples_are_reproducible() {
    let a = sandpile(&["sample-tree", "--d", "3", "--ball", "2", "--seed", "5"]);
    let b = sandpile(&["sample-tree", "--d", "3", "--ball", "2", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = sandpile(&["sample-sandpile", "--box", "3", "--seed", "5", "--format", "csv"]);
    let text = stdout(&csv);
    assert_eq!(text.lines().next(), Some("x1,x2,height"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn burn_emits_schedule() {
    let o = sandpile(&["burn", "--ball", "3", "--k", "1", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x1,x2,phase,step,rank"));
    assert_eq!(text.lines().count(), 30);
}

fn coupling_csv(threads: &str, dir: Option<&Path>) -> String {
    let mut args =
        vec!["experiment", "coupling", "--radii", "4,8,16", "--trials", "800", "--seed", "42", "--threads", threads];
    let d;
    if let Some(p) = dir {
        d = p.to_str().unwrap().to_string();
        args.extend(["--out-dir", &d]);
    }
    let o = sandpile(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
}

#[test]
fn coupling_rates_decrease_and_output_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let one = coupling_csv("1", Some(dir.path()));
    assert_eq!(one, coupling_csv("3", None));
    let mut lines = one.lines();
    assert_eq!(lines.next(), Some("experiment,n,partner,statistic,hits,trials,estimate,ci_low,ci_high"));
    let rates: Vec<f64> = lines.map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert_eq!(rates.len(), 3);
    assert!(rates[0] > rates[1] && rates[1] > rates[2], "{rates:?}");

    assert_eq!(std::fs::read_to_string(dir.path().join("coupling.csv")).unwrap(), one);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "coupling");
    assert_eq!(m["seed"], 42);
    assert_eq!(m["config"]["radii"], serde_json::json!([4, 8, 16]));
    assert_eq!(m["run"]["threads"], 1);
    assert!(m["prng"].as_str().unwrap().contains("splitmix64"));
    assert!(m["outputs"].as_array().unwrap().iter().any(|o| o == "coupling.csv"));
}

#[test]
fn fit_and_tv_experiments_run() {
    let o = sandpile(&["experiment", "fit", "--radii", "3,6,12", "--trials", "300", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("fit,3,12,alpha,")));
    let event = r#"{"kind":"site_height","k":1,"site":[0,0],"height":3}"#;
    let o = sandpile(&["experiment", "tv", "--radii", "2,4", "--trials", "200", "--seed", "1", "--event", event]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("experiment,"));
}

#[test]
fn errors_are_single_lines_with_exit_codes() {
    let usage = sandpile(&["experiment", "coupling"]);
    assert_eq!(usage.status.code(), Some(2));
    let msg = stderr(&usage);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.starts_with("error[usage]: "));

    let bad = sandpile(&["experiment", "coupling", "--radii", "16,8", "--seed", "1", "--trials", "10"]);
    assert_eq!(bad.status.code(), Some(1));
    let msg = stderr(&bad);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.starts_with("error["));

    let missing = sandpile(&["burn", "--input", "/nonexistent/eta.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(stderr(&missing).lines().count(), 1);

    let both = sandpile(&["sample-tree", "--ball", "3", "--box", "3", "--seed", "1"]);
    assert_eq!(both.status.code(), Some(2));
}
