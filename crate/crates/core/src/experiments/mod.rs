//! Scenario runner: parse one TOML configuration, dispatch to the named
//! scenario, persist artifacts, and always write a manifest. Outputs are a
//! pure function of the effective configuration — reruns are byte-identical
//! and thread-count independent.

pub mod collapse;
pub mod config;
pub mod correspondence;
pub mod decompose;
pub mod double_slit;
pub mod manifest;
pub mod suite;
pub mod wep;
pub mod writers;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::RunConfig;
pub use manifest::MANIFEST_NAME;
pub use writers::{ArtifactSet, OutputFormat};

/// CLI-level overrides applied to the parsed configuration before
/// validation. The manifest hashes the configuration after these.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    /// Scenario the invoking subcommand expects, if any.
    pub expect_scenario: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    pub artifacts: Vec<PathBuf>,
}

fn apply_overrides(cfg: &mut RunConfig, overrides: &Overrides) -> Result<()> {
    if let Some(seed) = overrides.seed {
        cfg.ensemble.get_or_insert_with(config::EnsembleBlock::default).seed = Some(seed);
    }
    if let Some(dir) = &overrides.out {
        cfg.output.dir = Some(dir.clone());
    }
    if let Some(format) = overrides.format {
        cfg.output.format = format;
    }
    if let Some(expected) = &overrides.expect_scenario {
        if &cfg.scenario != expected {
            return Err(Error::Config {
                path: "scenario".into(),
                message: format!(
                    "configuration declares scenario '{}' but the {expected} subcommand was invoked",
                    cfg.scenario
                ),
            });
        }
    }
    Ok(())
}

fn out_dir_for(cfg: &RunConfig) -> PathBuf {
    cfg.output
        .dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario))
}

/// Run the scenario described by the TOML file at `path`.
pub fn run_config(path: &Path, overrides: &Overrides) -> Result<RunSummary> {
    let text = fs::read_to_string(path)?;
    let mut cfg = RunConfig::parse(&text)?;
    apply_overrides(&mut cfg, overrides)?;
    cfg.validate()?;
    let seed = cfg.seed()?;
    let out_dir = out_dir_for(&cfg);
    let mut artifacts = ArtifactSet::create(&out_dir, cfg.output.format)?;
    match cfg.scenario.as_str() {
        "collapse" => {
            collapse::run(&cfg, &mut artifacts)?;
        }
        "wep" => {
            wep::run(&cfg, &mut artifacts)?;
        }
        "double_slit" => {
            double_slit::run(&cfg, &mut artifacts)?;
        }
        "decompose" => {
            decompose::run(&cfg, &mut artifacts)?;
        }
        "concentration_suite" => {
            let params = cfg.concentration.clone().unwrap_or_default();
            suite::run(&params, seed, &mut artifacts)?;
        }
        "correspondence" => {
            correspondence::run(&cfg, &mut artifacts)?;
        }
        other => return Err(Error::UnknownScenario(other.into())),
    }
    finish(cfg, seed, artifacts)
}

/// Run the concentration suite without a configuration file; `seed` keeps
/// the run deterministic and is recorded in the manifest.
pub fn run_concentration_suite(
    params: &config::SuiteBlock,
    seed: u64,
    out_dir: &Path,
    format: OutputFormat,
) -> Result<RunSummary> {
    let cfg = RunConfig {
        scenario: "concentration_suite".into(),
        geometry: None,
        flow: None,
        dynamics: None,
        ensemble: Some(config::EnsembleBlock {
            seed: Some(seed),
            sigma0: None,
            center: None,
            jitter: None,
            grid: None,
            snapshot_every: None,
            ergodic_fraction: None,
        }),
        output: config::OutputBlock { dir: Some(out_dir.to_path_buf()), format },
        collapse: None,
        wep: None,
        double_slit: None,
        decompose: None,
        concentration: Some(params.clone()),
        correspondence: None,
    };
    cfg.validate()?;
    let mut artifacts = ArtifactSet::create(out_dir, format)?;
    suite::run(params, seed, &mut artifacts)?;
    finish(cfg, seed, artifacts)
}

fn finish(cfg: RunConfig, seed: u64, artifacts: ArtifactSet) -> Result<RunSummary> {
    // The inputs hash covers the scientific configuration. Where artifacts
    // land and how they are encoded is not an input, so the output block is
    // excluded; reruns into different directories stay byte-identical.
    let mut hashed = cfg.clone();
    hashed.output = config::OutputBlock::default();
    let effective = hashed.to_toml()?;
    let out_dir = artifacts.dir().to_path_buf();
    let manifest = manifest::write_manifest(
        &out_dir,
        &cfg.scenario,
        seed,
        effective.as_bytes(),
        artifacts.files(),
    )?;
    Ok(RunSummary {
        scenario: cfg.scenario,
        seed,
        out_dir,
        manifest,
        artifacts: artifacts.files().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn write_config(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("run.toml");
        fs::write(&path, text).unwrap();
        path
    }

    fn hash_outputs(dir: &Path) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for entry in fs::read_dir(dir).unwrap() {
            let entry = entry.unwrap();
            let bytes = fs::read(entry.path()).unwrap();
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                manifest::sha256_hex(&bytes),
            );
        }
        out
    }

    const SMALL_COLLAPSE: &str = r#"
scenario = "collapse"

[geometry]
d = 2
n_molecules = 60

[flow]
semi_period = 1.0

[dynamics]
dt = 0.0625

[ensemble]
seed = 31
sigma0 = 0.5

[collapse]
n_cycles = 2
"#;

    #[test]
    fn run_config_writes_artifacts_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), SMALL_COLLAPSE);
        let out = dir.path().join("out");
        let overrides = Overrides { out: Some(out.clone()), ..Default::default() };
        let summary = run_config(&cfg_path, &overrides).unwrap();
        assert_eq!(summary.scenario, "collapse");
        assert_eq!(summary.seed, 31);
        assert!(summary.manifest.exists());
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&summary.manifest).unwrap()).unwrap();
        let listed: Vec<&str> = manifest["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|o| o["path"].as_str().unwrap())
            .collect();
        for file in &summary.artifacts {
            let name = file.file_name().unwrap().to_string_lossy();
            assert!(listed.contains(&name.as_ref()), "{name} missing from manifest");
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), SMALL_COLLAPSE);
        let out1 = dir.path().join("a");
        let out2 = dir.path().join("b");
        run_config(&cfg_path, &Overrides { out: Some(out1.clone()), ..Default::default() })
            .unwrap();
        run_config(&cfg_path, &Overrides { out: Some(out2.clone()), ..Default::default() })
            .unwrap();
        assert_eq!(hash_outputs(&out1), hash_outputs(&out2));
    }

    #[test]
    fn seed_override_changes_the_effective_config_hash() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), SMALL_COLLAPSE);
        let out1 = dir.path().join("a");
        let out2 = dir.path().join("b");
        let s1 = run_config(&cfg_path, &Overrides { out: Some(out1), ..Default::default() })
            .unwrap();
        let s2 = run_config(
            &cfg_path,
            &Overrides { seed: Some(99), out: Some(out2), ..Default::default() },
        )
        .unwrap();
        assert_eq!(s2.seed, 99);
        let m1: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&s1.manifest).unwrap()).unwrap();
        let m2: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&s2.manifest).unwrap()).unwrap();
        assert_ne!(m1["config_sha256"], m2["config_sha256"]);
    }

    #[test]
    fn subcommand_scenario_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = write_config(dir.path(), SMALL_COLLAPSE);
        let overrides = Overrides {
            expect_scenario: Some("wep".into()),
            out: Some(dir.path().join("o")),
            ..Default::default()
        };
        match run_config(&cfg_path, &overrides) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "scenario");
                assert!(message.contains("collapse"));
            }
            other => panic!("expected scenario mismatch, got {other:?}"),
        }
    }

    #[test]
    fn suite_runs_without_a_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let params = config::SuiteBlock {
            samples: 5_000,
            gaussian_dim: 50,
            ..Default::default()
        };
        let summary =
            run_concentration_suite(&params, 7, &dir.path().join("suite"), OutputFormat::Json)
                .unwrap();
        assert_eq!(summary.scenario, "concentration_suite");
        assert!(summary.artifacts.iter().any(|p| p.ends_with("sphere.json")));
        assert!(summary.manifest.exists());
    }
}
