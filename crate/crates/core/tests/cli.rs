//! End-to-end tests of the `hrsim` binary: exit codes, stdout/stderr wording,
//! manifest contents, and byte-level determinism across reruns and thread
//! counts. Every invocation points `--out` into a scratch directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CONFIG: &str = r#"
scenario = "collapse"

[geometry]
d = 2
n_molecules = 250

[flow]
semi_period = 1.0

[dynamics]
dt = 0.0625

[ensemble]
seed = 5
sigma0 = 0.5

[collapse]
n_cycles = 2
"#;

fn hrsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn hrsim")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Relative path -> file bytes for every file under `root`.
fn dir_contents(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn manifest(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn run_writes_artifacts_and_a_manifest_listing_them() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out_dir = tmp.path().join("out");

    let out = hrsim(
        &["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("scenario:  collapse"), "stdout: {text}");
    assert!(text.contains("manifest:"), "stdout: {text}");

    let m = manifest(&out_dir);
    assert_eq!(m["scenario"], "collapse");
    assert_eq!(m["seed"], 5);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for entry in outputs {
        let rel = entry["path"].as_str().unwrap();
        let file = out_dir.join(rel);
        assert!(file.is_file(), "manifest lists missing artifact {rel}");
        assert_eq!(
            entry["bytes"].as_u64().unwrap(),
            fs::metadata(&file).unwrap().len(),
            "stale byte count for {rel}"
        );
    }
}

#[test]
fn reruns_and_thread_counts_produce_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let run = |dir: &str, threads: &str| {
        let out_dir = tmp.path().join(dir);
        let out = hrsim(
            &[
                "run",
                cfg.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                threads,
            ],
            tmp.path(),
        );
        assert!(out.status.success(), "stderr: {}", stderr(&out));
        dir_contents(&out_dir)
    };

    let single = run("a", "1");
    let pooled = run("b", "4");
    let repeat = run("c", "1");
    assert!(single.contains_key("manifest.json"));
    assert_eq!(single, pooled, "outputs depend on --threads");
    assert_eq!(single, repeat, "rerun changed output bytes");
}

#[test]
fn seed_override_is_recorded_and_rehashed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let baseline_dir = tmp.path().join("base");
    let seeded_dir = tmp.path().join("seeded");

    let base = hrsim(
        &["run", cfg.to_str().unwrap(), "--out", baseline_dir.to_str().unwrap()],
        tmp.path(),
    );
    assert!(base.status.success(), "stderr: {}", stderr(&base));
    let seeded = hrsim(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            seeded_dir.to_str().unwrap(),
            "--seed",
            "999",
        ],
        tmp.path(),
    );
    assert!(seeded.status.success(), "stderr: {}", stderr(&seeded));

    let m_base = manifest(&baseline_dir);
    let m_seeded = manifest(&seeded_dir);
    assert_eq!(m_base["seed"], 5);
    assert_eq!(m_seeded["seed"], 999);
    assert_ne!(
        m_base["config_sha256"], m_seeded["config_sha256"],
        "seed override must change the effective configuration hash"
    );
}

#[test]
fn format_json_encodes_tables_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out_dir = tmp.path().join("out");

    let out = hrsim(
        &[
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--format",
            "json",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let files = dir_contents(&out_dir);
    assert!(files.keys().all(|name| !name.ends_with(".csv")), "csv artifact despite --format json");
    assert!(
        files.keys().any(|name| name.ends_with(".json") && name != "manifest.json"),
        "no json tables written: {:?}",
        files.keys().collect::<Vec<_>>()
    );
}

#[test]
fn missing_seed_fails_naming_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CONFIG.replace("seed = 5\n", ""));
    let out = hrsim(
        &["run", cfg.to_str().unwrap(), "--out", tmp.path().join("out").to_str().unwrap()],
        tmp.path(),
    );
    assert!(!out.status.success());
    let text = stderr(&out);
    assert!(text.contains("ensemble.seed"), "stderr should name the field: {text}");
}

#[test]
fn unknown_scenario_fails_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CONFIG.replace("\"collapse\"", "\"teleport\""));
    let out = hrsim(
        &["run", cfg.to_str().unwrap(), "--out", tmp.path().join("out").to_str().unwrap()],
        tmp.path(),
    );
    assert!(!out.status.success());
    let text = stderr(&out);
    assert!(text.contains("teleport"), "stderr should name the scenario: {text}");
}

#[test]
fn scenario_subcommand_rejects_mismatched_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out = hrsim(
        &["wep", cfg.to_str().unwrap(), "--out", tmp.path().join("out").to_str().unwrap()],
        tmp.path(),
    );
    assert!(!out.status.success(), "wep subcommand accepted a collapse config");
    let text = stderr(&out);
    assert!(
        text.contains("collapse") && text.contains("scenario"),
        "stderr should point at the scenario mismatch: {text}"
    );
}

#[test]
fn matching_scenario_subcommand_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CONFIG);
    let out_dir = tmp.path().join("out");
    let out = hrsim(
        &["collapse", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(manifest(&out_dir)["scenario"], "collapse");
}

#[test]
fn concentration_suite_runs_without_a_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("suite");
    let out = hrsim(
        &["concentration-suite", "--out", out_dir.to_str().unwrap(), "--seed", "3"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let m = manifest(&out_dir);
    assert_eq!(m["scenario"], "concentration_suite");
    assert_eq!(m["seed"], 3);
    assert!(!m["outputs"].as_array().unwrap().is_empty());
}
