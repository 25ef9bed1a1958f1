//! Collapse-cycle scenario: run n fundamental cycles, flag the natural
//! reduction in each, and confirm the deformed Hamiltonian vanishes at the
//! metastable points t = (2n+1)T.

use serde::Serialize;

use crate::concentration::{collapse_metrics, CollapseReport};
use crate::ensemble::{run_cycle, CyclePhase, MoleculeEnsemble};
use crate::error::Result;
use crate::flow::{flow_snapshot, metastable_residual, symmetrize_time_inversion, FlowSnapshot};
use crate::geometry::{averaged_metric, HyperboloidSampler, LorentzMetric, PhasePoint, RandersStructure};
use nalgebra::{DMatrix, DVector};

use super::config::RunConfig;
use super::writers::{ArtifactSet, Cell};

/// Stream salt for the averaged-metric sampler, distinct from every cycle
/// stream.
const METRIC_SEED_SALT: u64 = 0xA5A5_5A5A;

#[derive(Debug, Clone, Serialize)]
pub struct CycleSummary {
    pub cycle: u64,
    pub collapsed: bool,
    pub variance_ergodic: f64,
    pub variance_contracted: f64,
    pub variance_expansive: f64,
    /// variance_contracted / variance_ergodic.
    pub contraction_ratio: f64,
    pub spread_over_sigma: f64,
    /// max |H_t| at the cycle's metastable point t = T.
    pub residual_at_metastable: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InteractionMeta {
    /// Classification of the contraction term among the interaction kinds:
    /// it acts only where kappa is near 1, i.e. near t = (2n+1)T.
    pub classification: &'static str,
    pub domain: &'static str,
    pub lambda_c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseSummary {
    pub n_cycles: usize,
    pub n_molecules: usize,
    pub collapse_events: usize,
    pub max_residual: f64,
    pub interaction: InteractionMeta,
    pub cycles: Vec<CycleSummary>,
}

fn phase_name(phase: CyclePhase) -> &'static str {
    match phase {
        CyclePhase::Ergodic => "ergodic",
        CyclePhase::Contractive => "contractive",
        CyclePhase::Expansive => "expansive",
    }
}

/// Reflection-symmetric averaged metric of the per-molecule structure at the
/// reference configuration. The symmetrization makes the t = T residual an
/// identity of the reflection, not a numerical accident.
fn residual_structure(
    cfg: &RunConfig,
) -> Result<(RandersStructure, DMatrix<f64>)> {
    let geo = cfg.geometry()?;
    let s = RandersStructure::new(&LorentzMetric::minkowski(geo.d), 1, cfg.beta_field()?)?;
    let sampler = HyperboloidSampler::new(4096, cfg.seed()?.wrapping_add(METRIC_SEED_SALT));
    let u_ref = DVector::zeros(2 * geo.d);
    let h = averaged_metric(&s, &u_ref, &sampler)?.matrix;
    let h_sym = symmetrize_time_inversion(&h, geo.d, 1)?;
    Ok((s, h_sym))
}

fn probe_states(e: &MoleculeEnsemble, count: usize) -> Vec<PhasePoint> {
    e.states.iter().take(count.max(1)).cloned().collect()
}

pub fn run(cfg: &RunConfig, artifacts: &mut ArtifactSet) -> Result<CollapseSummary> {
    let params = cfg.collapse.clone().unwrap_or_default();
    let cycle_cfg = cfg.cycle_config()?;
    let seed = cfg.seed()?;
    let mut ensemble = cfg.build_ensemble(seed)?;
    let sigma0 = cfg.ensemble()?.sigma0.unwrap_or(0.5);
    let (structure, h_sym) = residual_structure(cfg)?;
    let schedule = cfg.schedule()?;
    let tt = schedule.semi_period;

    // Residual sweep over internal time with the starting probe set.
    let sweep = sweep_rows(&structure, &h_sym, &schedule, &probe_states(&ensemble, params.residual_probes))?;
    artifacts.write_table(
        "residual_sweep",
        &["t", "kappa", "residual"],
        &sweep
            .iter()
            .map(|s| vec![Cell::from(s.t), Cell::from(s.kappa), Cell::from(s.residual)])
            .collect::<Vec<_>>(),
    )?;

    let d = ensemble.d;
    let traced = params.traced_molecules.min(ensemble.n);
    let mut variance_rows = Vec::new();
    let mut trajectory_rows = Vec::new();
    let mut cycles = Vec::with_capacity(params.n_cycles);
    let mut max_residual = 0.0f64;

    for cycle in 0..params.n_cycles as u64 {
        let record = run_cycle(&mut ensemble, &cycle_cfg, cycle)?;
        let t_offset = cycle as f64 * 2.0 * tt;
        for snap in &record.snapshots {
            variance_rows.push(vec![
                Cell::from(cycle as i64),
                Cell::from(snap.t),
                Cell::from(t_offset + snap.t),
                Cell::from(phase_name(snap.phase)),
                Cell::from(crate::ensemble::position_variance(&snap.positions)),
            ]);
            for id in 0..traced {
                let mut row = vec![
                    Cell::from(cycle as i64),
                    Cell::from(t_offset + snap.t),
                    Cell::from(id),
                ];
                for k in 0..d {
                    row.push(Cell::from(snap.positions[id][k]));
                }
                trajectory_rows.push(row);
            }
        }

        let report: CollapseReport = collapse_metrics(&record, sigma0, params.spread_threshold)?;
        let probes = probe_states(&ensemble, params.residual_probes);
        let residual = metastable_residual(&structure, &h_sym, &schedule, tt, &probes)?;
        max_residual = max_residual.max(residual);
        let ratio = if report.variance_ergodic > 0.0 {
            report.variance_contracted / report.variance_ergodic
        } else {
            f64::NAN
        };
        cycles.push(CycleSummary {
            cycle,
            collapsed: report.collapsed,
            variance_ergodic: report.variance_ergodic,
            variance_contracted: report.variance_contracted,
            variance_expansive: report.variance_expansive,
            contraction_ratio: ratio,
            spread_over_sigma: report.spread_over_sigma,
            residual_at_metastable: residual,
        });
    }

    artifacts.write_table(
        "variance_curve",
        &["cycle", "t", "t_global", "phase", "variance"],
        &variance_rows,
    )?;
    let mut columns: Vec<String> = vec!["cycle".into(), "t_global".into(), "molecule_id".into()];
    for k in 0..d {
        columns.push(format!("x{k}"));
    }
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    artifacts.write_table("trajectories", &column_refs, &trajectory_rows)?;

    let summary = CollapseSummary {
        n_cycles: params.n_cycles,
        n_molecules: ensemble.n,
        collapse_events: cycles.iter().filter(|c| c.collapsed).count(),
        max_residual,
        interaction: InteractionMeta {
            classification: "classical",
            domain: "active only near the metastable points t = (2n+1)T",
            lambda_c: cycle_cfg.lambda_c,
        },
        cycles,
    };
    artifacts.write_report("collapse_report.json", &summary)?;
    Ok(summary)
}

fn sweep_rows(
    structure: &RandersStructure,
    h_sym: &DMatrix<f64>,
    schedule: &crate::flow::KappaSchedule,
    probes: &[PhasePoint],
) -> Result<Vec<FlowSnapshot>> {
    let tt = schedule.semi_period;
    let points = 17;
    (0..points)
        .map(|i| {
            let t = tt * i as f64 / (points - 1) as f64;
            flow_snapshot(structure, h_sym, schedule, t, probes)
        })
        .collect()
}
