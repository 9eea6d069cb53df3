//! Binary-level behavior: exit codes, error records, report files, config
//! precedence, and the synth → analyze round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn egonet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egonet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("stderr not JSON ({e}): {text}"))
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

/// Light diffusion spec so synthetic event logs stay small.
const LIGHT_DIFFUSION: &str = "\
ring1.alpha=0.03\nring1.beta=0.74\nring1.sigma=0.05\n\
ring2.alpha=0.02\nring2.beta=0.76\nring2.sigma=0.05\n\
ring3.alpha=0.03\nring3.beta=0.80\nring3.sigma=0.05\n\
ring4.alpha=0.06\nring4.beta=0.85\nring4.sigma=0.05\n\
ring5.alpha=0.09\nring5.beta=0.99\nring5.sigma=0.05\n\
total_retweets=300\n";

fn synth_events(dir: &Path, egos: usize, seed: u64) {
    let spec = dir.join("diffusion_spec.txt");
    fs::write(&spec, LIGHT_DIFFUSION).unwrap();
    let out = egonet(
        &[
            "synth",
            "--egos",
            &egos.to_string(),
            "--seed",
            &seed.to_string(),
            "--diffusion-spec",
            spec.to_str().unwrap(),
            "--out",
            "synth",
        ],
        dir,
    );
    assert!(out.status.success(), "synth failed: {out:?}");
}

#[test]
fn synth_then_full_run_round_trips() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_events(dir, 10, 11);
    for f in ["events.csv", "accounts.csv", "social_graph.csv"] {
        assert!(dir.join("synth").join(f).exists(), "missing {f}");
    }

    let out = egonet(
        &[
            "all",
            "--input",
            "synth/events.csv",
            "--accounts",
            "synth/accounts.csv",
            "--out",
            "rep",
        ],
        dir,
    );
    assert!(out.status.success(), "all failed: {out:?}");

    let rep = dir.join("rep");
    let headers = [
        ("kstar_density.csv", "k,count,share,mean_size,ci95_size"),
        (
            "circles.csv",
            "circle,mean_min_freq,ci95_min_freq,mean_size,ci95_size,scaling_factor,ci95_scaling",
        ),
        (
            "mapping.csv",
            "name,measured_size,scale_factor,scaled_size,reference_size",
        ),
        ("rings_diffusion.csv", "ring,class,n,r,beta,alpha"),
        (
            "ring_volumes.csv",
            "ring,mean_retweets_per_link,mean_retweets_per_ego",
        ),
        ("ccdf.csv", "normalized_frequency,ccdf"),
    ];
    for (name, header) in headers {
        let text = read(&rep, name);
        assert_eq!(text.lines().next().unwrap(), header, "header of {name}");
        assert!(text.lines().count() > 1, "{name} has no data rows");
    }

    let summary: serde_json::Value = serde_json::from_str(&read(&rep, "summary.json")).unwrap();
    assert_eq!(summary["format"], "events");
    assert_eq!(summary["egos_eligible"], 10);
    assert_eq!(summary["egos_in_circles"], 10);
    assert_eq!(summary["fixed_k"], 5);
    assert!(summary["timings_ms"].is_object());
}

#[test]
fn windowed_synth_round_trips() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let out = egonet(
        &["synth", "--egos", "8", "--seed", "5", "--format", "windowed", "--out", "synth"],
        dir,
    );
    assert!(out.status.success(), "synth failed: {out:?}");
    assert!(dir.join("synth/window_graph.csv").exists());

    let out = egonet(
        &[
            "layers",
            "--format",
            "windowed",
            "--input",
            "synth/window_graph.csv",
            "--accounts",
            "synth/accounts.csv",
            "--social-graph",
            "synth/social_graph.csv",
            "--out",
            "rep",
        ],
        dir,
    );
    assert!(out.status.success(), "layers failed: {out:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("rep"), "summary.json")).unwrap();
    assert_eq!(summary["format"], "windowed");
    assert_eq!(summary["fixed_k"], 4);
    assert_eq!(summary["egos_in_circles"], 8);
    // Layer tables only; diffusion files belong to the other subcommands.
    assert!(dir.join("rep/circles.csv").exists());
    assert!(!dir.join("rep/rings_diffusion.csv").exists());
}

#[test]
fn reports_are_idempotent() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_events(dir, 6, 23);
    for rep in ["rep1", "rep2"] {
        let out = egonet(
            &[
                "all",
                "--input",
                "synth/events.csv",
                "--accounts",
                "synth/accounts.csv",
                "--out",
                rep,
            ],
            dir,
        );
        assert!(out.status.success(), "run {rep} failed: {out:?}");
    }
    for f in [
        "kstar_density.csv",
        "circles.csv",
        "mapping.csv",
        "rings_diffusion.csv",
        "ring_volumes.csv",
        "ccdf.csv",
    ] {
        assert_eq!(
            read(&dir.join("rep1"), f),
            read(&dir.join("rep2"), f),
            "{f} differs between identical runs"
        );
    }
}

#[test]
fn ingest_reports_counts_only() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_events(dir, 5, 31);
    let out = egonet(
        &[
            "ingest",
            "--input",
            "synth/events.csv",
            "--accounts",
            "synth/accounts.csv",
            "--out",
            "rep",
        ],
        dir,
    );
    assert!(out.status.success(), "ingest failed: {out:?}");
    assert!(dir.join("rep/summary.json").exists());
    assert!(!dir.join("rep/circles.csv").exists());
    assert!(!dir.join("rep/rings_diffusion.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("rep"), "summary.json")).unwrap();
    assert_eq!(summary["egos_eligible"], 5);
    assert!(summary["links"].as_u64().unwrap() > 0);
}

#[test]
fn empty_eligible_set_exits_two() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("tiny.csv"), "ego,alter,n1,n2,n3,n4\n1,2,0,0,0,1\n").unwrap();
    let out = egonet(
        &["all", "--format", "windowed", "--input", "tiny.csv", "--out", "rep"],
        dir,
    );
    assert_eq!(out.status.code(), Some(2));
    let record = stderr_json(&out);
    assert_eq!(record["error"], "no eligible egos");
    assert_eq!(record["exit_code"], 2);
}

#[test]
fn missing_input_fails_with_json_error() {
    let tmp = TempDir::new().unwrap();
    let out = egonet(&["all", "--input", "does_not_exist.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let record = stderr_json(&out);
    assert!(
        record["error"].as_str().unwrap().contains("does_not_exist.csv"),
        "error names the missing file: {record}"
    );
}

#[test]
fn malformed_input_fails_with_json_error() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    // Decreasing counts violate the cumulative-window invariant.
    fs::write(dir.join("bad.csv"), "ego,alter,n1,n2,n3,n4\n1,2,5,4,4,4\n").unwrap();
    let out = egonet(
        &["all", "--format", "windowed", "--input", "bad.csv", "--out", "rep"],
        dir,
    );
    assert_eq!(out.status.code(), Some(1));
    let record = stderr_json(&out);
    assert!(
        record["error"].as_str().unwrap().contains("line 2"),
        "error carries the offending line: {record}"
    );
}

#[test]
fn config_file_overrides_defaults_and_flags_win() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    synth_events(dir, 6, 47);
    fs::write(dir.join("run.cfg"), "fixed_k=4\nrings=3\nk_max=10\n").unwrap();

    let out = egonet(
        &[
            "all",
            "--input",
            "synth/events.csv",
            "--config",
            "run.cfg",
            "--out",
            "rep1",
        ],
        dir,
    );
    assert!(out.status.success(), "config run failed: {out:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("rep1"), "summary.json")).unwrap();
    assert_eq!(summary["fixed_k"], 4);
    assert_eq!(summary["rings"], 3);
    assert_eq!(summary["k_max"], 10);

    let out = egonet(
        &[
            "all",
            "--input",
            "synth/events.csv",
            "--config",
            "run.cfg",
            "--fixed-k",
            "6",
            "--out",
            "rep2",
        ],
        dir,
    );
    assert!(out.status.success(), "flag-override run failed: {out:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.join("rep2"), "summary.json")).unwrap();
    assert_eq!(summary["fixed_k"], 6, "explicit flag beats config file");
    assert_eq!(summary["rings"], 3, "config still applies where no flag is given");
}

#[test]
fn malformed_config_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("in.csv"), "ego,alter,n1,n2,n3,n4\n1,2,1,2,3,4\n").unwrap();
    fs::write(dir.join("bad.cfg"), "not_a_key=1\n").unwrap();
    let out = egonet(
        &[
            "layers",
            "--format",
            "windowed",
            "--input",
            "in.csv",
            "--config",
            "bad.cfg",
        ],
        dir,
    );
    assert_eq!(out.status.code(), Some(1));
    let record = stderr_json(&out);
    assert!(
        record["error"].as_str().unwrap().contains("not_a_key"),
        "error names the unknown key: {record}"
    );
}
