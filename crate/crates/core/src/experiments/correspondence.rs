//! Correspondence runner: expectation-value trajectory of the evolved
//! position operator against the classical drift, persisted in the standard
//! trajectory schema.

use serde::Serialize;

use crate::dynamics::DEFAULT_DRIFT_FACTOR;
use crate::error::Result;
use crate::quantization::{build_operators, correspondence_check, gaussian_packet};

use super::config::RunConfig;
use super::writers::{ArtifactSet, Cell};

#[derive(Debug, Clone, Serialize)]
pub struct CorrespondenceSummary {
    pub b: f64,
    pub drift_factor: f64,
    pub grid_size: usize,
    pub spacing: f64,
    pub dtau: f64,
    pub steps_requested: usize,
    pub steps_completed: usize,
    pub truncated: bool,
    pub max_rel_error: f64,
}

pub fn run(cfg: &RunConfig, artifacts: &mut ArtifactSet) -> Result<CorrespondenceSummary> {
    let block = cfg.correspondence.clone().unwrap_or_default();
    let drift_factor = cfg
        .dynamics
        .as_ref()
        .and_then(|d| d.drift_factor)
        .unwrap_or(DEFAULT_DRIFT_FACTOR);
    let th = build_operators(block.grid_size, block.spacing, 1.0)?;
    let packet = gaussian_packet(&th, 0.0, block.packet_sigma, 0.0)?;
    let report = correspondence_check(block.b, &th, &packet, block.dtau, block.steps, drift_factor)?;

    let rows: Vec<Vec<Cell>> = report
        .tau
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            vec![
                Cell::from(tau),
                Cell::from(report.expect_x[i]),
                Cell::from(report.classical_x[i]),
                Cell::from(report.abs_error[i]),
            ]
        })
        .collect();
    artifacts.write_table(
        "expectation",
        &["tau", "expect_x", "classical_x", "abs_error"],
        &rows,
    )?;

    let summary = CorrespondenceSummary {
        b: block.b,
        drift_factor,
        grid_size: block.grid_size,
        spacing: block.spacing,
        dtau: block.dtau,
        steps_requested: block.steps,
        steps_completed: report.steps_completed,
        truncated: report.truncated,
        max_rel_error: report.max_rel_error,
    };
    artifacts.write_report("correspondence_report.json", &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::writers::OutputFormat;

    #[test]
    fn default_run_tracks_the_classical_drift() {
        let text = r#"
scenario = "correspondence"

[ensemble]
seed = 3

[correspondence]
grid_size = 128
steps = 40
"#;
        let cfg = RunConfig::parse(text).unwrap();
        cfg.validate().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let mut artifacts = ArtifactSet::create(dir.path(), OutputFormat::Csv).unwrap();
        let summary = run(&cfg, &mut artifacts).unwrap();
        assert!(!summary.truncated);
        assert!(summary.max_rel_error < 1e-6, "rel error {}", summary.max_rel_error);
        let text = std::fs::read_to_string(dir.path().join("expectation.csv")).unwrap();
        assert!(text.starts_with("tau,expect_x,classical_x,abs_error\n"));
        assert_eq!(text.lines().count(), summary.steps_completed + 2);
    }
}
