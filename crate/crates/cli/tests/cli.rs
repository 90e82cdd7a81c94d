use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qae")).args(args).output().expect("spawn qae")
}

fn run_preset(name: &str, out: &Path, extra: &[&str]) -> Value {
    let mut args = vec!["run", name, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = qae(&args);
    assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join(name).join("summary.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fig4a_reaches_low_cost() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_preset("fig4a", dir.path(), &[]);
    assert!(s["final_cost_best"].as_f64().unwrap() <= 0.01);
    assert_eq!(s["runs"].as_array().unwrap().len(), 20);
    assert_eq!(s["runs"][0]["final_params"].as_array().unwrap().len(), 16);
    let trace = fs::read_to_string(dir.path().join("fig4a/trace_0.csv")).unwrap();
    assert!(trace.starts_with("iteration,cost,a,b,k\n"));
    let stats = fs::read_to_string(dir.path().join("fig4a/trace_stats.csv")).unwrap();
    assert!(stats.starts_with("iteration,mean,std\n"));
}

#[test]
fn fig3_cnot_reaches_high_process_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_preset("fig3_cnot", dir.path(), &[]);
    assert!(s["process_fidelity"].as_f64().unwrap() >= 0.999);
    let re = fs::read_to_string(dir.path().join("fig3_cnot/chi_ideal_re.csv")).unwrap();
    let lines: Vec<&str> = re.lines().collect();
    assert_eq!(lines.len(), 17);
    assert_eq!(lines[1].split(',').count(), 17);
}

#[test]
fn fig5a_summary_carries_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_preset("fig5a", dir.path(), &["--runs", "4"]);
    let bound = s["bound"].as_f64().unwrap();
    assert!((bound - 0.0712013479566227).abs() < 1e-10);
    assert!(s["final_cost_best"].as_f64().unwrap() >= bound - 1e-9);
}

#[test]
fn empty_ensemble_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    fs::write(&cfg, "kind = \"train\"\n[ensemble]\nstates = []\n").unwrap();
    let o = qae(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("ensemble: empty"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    fs::write(&cfg, "kind = \"train\"\n[ensemble]\nstates = [{ terms = [[\"RH\", 1]] }]\n[train]\nstep = 0.1\n").unwrap();
    let o = qae(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("step"), "{}", stderr(&o));
}

#[test]
fn non_orthogonal_targets_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("targets.toml");
    fs::write(
        &cfg,
        "kind = \"discriminate\"\n[problem]\ngroup_a = [{ theta_degrees = 0.0 }]\ngroup_b = [{ theta_degrees = 60.0 }]\ntarget_b = [1, 0]\n",
    )
    .unwrap();
    let o = qae(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).to_lowercase().contains("orthogonal"), "{}", stderr(&o));
}

#[test]
fn reruns_are_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--runs", "3", "--shots", "500", "--seed", "11", "--jobs", "2"];
    run_preset("figS1a", d1.path(), &args);
    run_preset("figS1a", d2.path(), &args[..6]);
    for f in ["trace_0.csv", "trace_2.csv", "trace_stats.csv", "summary.json"] {
        let a = fs::read(d1.path().join("figS1a").join(f)).unwrap();
        let b = fs::read(d2.path().join("figS1a").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn seed_changes_the_trace() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_preset("fig4a", d1.path(), &["--runs", "1", "--seed", "1"]);
    run_preset("fig4a", d2.path(), &["--runs", "1", "--seed", "2"]);
    let a = fs::read(d1.path().join("fig4a/trace_0.csv")).unwrap();
    let b = fs::read(d2.path().join("fig4a/trace_0.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn subcommands_print_values() {
    let o = qae(&["encode", "fig4a"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let cost: f64 = text.lines().next().unwrap().strip_prefix("cost ").unwrap().parse().unwrap();
    assert!(cost.abs() < 1e-12);

    let o = qae(&["bound", "figS12b"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("bound 0.0712") && text.contains("interval_average_bound"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    assert!(qae(&["gates", "--out", dir.path().to_str().unwrap()]).status.success());
    let swap = fs::read_to_string(dir.path().join("swap.txt")).unwrap();
    assert!(swap.starts_with("4 4\n"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 9);

    let o = qae(&["chi", "identity"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().nth(2).unwrap().starts_with("II,1,0"), "{text}");

    let o = qae(&["presets"]);
    assert!(String::from_utf8_lossy(&o.stdout).lines().count() >= 31);
}

#[test]
fn shot_flags_conflict() {
    let o = qae(&["run", "fig4a", "--exact", "--shots", "10"]);
    assert!(!o.status.success());
}
