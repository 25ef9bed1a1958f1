//! Weak-equivalence scenario: two ensembles of different composition, same
//! starting median, same drift law. The observable centers of mass must
//! track each other within the statistical envelope of the median — the
//! composition (jitter shape, molecule mass) never enters the cycle map.

use nalgebra::DVector;
use serde::Serialize;

use crate::ensemble::{coordinate_median, run_cycle, JitterLaw, MoleculeEnsemble};
use crate::error::{Error, Result};

use super::config::RunConfig;
use super::writers::{ArtifactSet, Cell};

/// Starting medians are "identical" below this gap; above it the pairing is
/// a setup error.
pub const MEDIAN_MATCH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SystemSpec {
    pub label: String,
    pub jitter: JitterLaw,
    pub mass: f64,
    pub seed: u64,
}

/// Median trajectories of one A/B pairing.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub taus: Vec<f64>,
    pub med_a: Vec<DVector<f64>>,
    pub med_b: Vec<DVector<f64>>,
    /// Coordinate-wise sup deviation per tick.
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    /// Root mean square over the evolved ticks; the low-noise statistic for
    /// scaling checks.
    pub rms_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShrinkageSummary {
    pub n_base: usize,
    pub n_doubled: usize,
    pub seeds: usize,
    pub mean_rms_base: f64,
    pub mean_rms_doubled: f64,
    /// mean_rms_base / mean_rms_doubled; sqrt(2) under CLT scaling.
    pub ratio: f64,
    pub expected: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct WepSummary {
    pub n_molecules: usize,
    pub n_taus: usize,
    pub max_deviation: f64,
    /// CLT envelope 5 / sqrt(N).
    pub clt_envelope: f64,
    pub pass: bool,
    pub relabel_invariant: bool,
    /// exp(-c2 N^2): the idealized subquantum rate, drawn on the comparison
    /// curve but far below anything a finite sample can certify.
    pub ideal_rate: f64,
    pub systems: Vec<SystemSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrinkage: Option<ShrinkageSummary>,
}

fn jitter_sigma(law: &JitterLaw) -> f64 {
    match law {
        JitterLaw::None => 0.0,
        JitterLaw::Uniform { step } => step / 3.0f64.sqrt(),
        JitterLaw::Gaussian { sigma } => *sigma,
    }
}

/// Default composition pair: Gaussian jitter vs. a uniform law of the same
/// variance, molecule masses 1 vs. mass_b, independent seeds.
pub fn default_specs(cfg: &RunConfig) -> Result<(SystemSpec, SystemSpec)> {
    let seed = cfg.seed()?;
    let params = cfg.wep.clone().unwrap_or_default();
    let jitter_a = cfg
        .ensemble()?
        .jitter
        .unwrap_or(JitterLaw::Gaussian { sigma: 0.01 });
    let jitter_b = params.jitter_b.unwrap_or(JitterLaw::Uniform {
        step: jitter_sigma(&jitter_a) * 3.0f64.sqrt(),
    });
    Ok((
        SystemSpec { label: "A".into(), jitter: jitter_a, mass: 1.0, seed },
        SystemSpec { label: "B".into(), jitter: jitter_b, mass: params.mass_b, seed: seed.wrapping_add(1) },
    ))
}

fn build_system(cfg: &RunConfig, spec: &SystemSpec, n: usize) -> Result<MoleculeEnsemble> {
    let geo = cfg.geometry()?;
    let ens = cfg.ensemble()?;
    let center = ens.center.clone().unwrap_or_else(|| vec![0.0; geo.d]);
    MoleculeEnsemble::gaussian_cloud(
        n,
        geo.d,
        &center,
        ens.sigma0.unwrap_or(0.5),
        spec.mass,
        spec.mass * n as f64,
        cfg.flow()?.semi_period,
        spec.seed,
    )
}

fn metastable_median(record: &crate::ensemble::CycleRecord, tt: f64) -> Result<DVector<f64>> {
    let snap = record
        .snapshots
        .iter()
        .min_by(|a, b| {
            (a.t - tt)
                .abs()
                .partial_cmp(&(b.t - tt).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(|| Error::Setup("cycle record has no snapshots".into()))?;
    coordinate_median(&snap.positions)
}

fn sup_gap(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Evolve systems A and B through `n_taus` cycles and compare their median
/// world lines at the metastable point of each cycle.
pub fn run_pair(
    cfg: &RunConfig,
    a: &SystemSpec,
    b: &SystemSpec,
    n: usize,
    align_medians: bool,
) -> Result<PairOutcome> {
    let n_taus = cfg.wep.clone().unwrap_or_default().n_taus;
    let tt = cfg.flow()?.semi_period;
    let d = cfg.geometry()?.d;
    let mut ens_a = build_system(cfg, a, n)?;
    let mut ens_b = build_system(cfg, b, n)?;

    if align_medians {
        // Both systems are translated to the shared configured center, not
        // one onto the other: relabeling A <-> B then evolves the exact same
        // absolutely-positioned clouds, so the deviation series is symmetric
        // down to the last bit.
        let center = cfg
            .ensemble()?
            .center
            .clone()
            .unwrap_or_else(|| vec![0.0; d]);
        for ens in [&mut ens_a, &mut ens_b] {
            let med = coordinate_median(&ens.positions())?;
            let shift: Vec<f64> = (0..d).map(|k| center[k] - med[k]).collect();
            for state in &mut ens.states {
                for (k, s) in shift.iter().enumerate() {
                    state.u[k] += s;
                }
            }
        }
    }
    let start_a = coordinate_median(&ens_a.positions())?;
    let start_b = coordinate_median(&ens_b.positions())?;
    let start_gap = sup_gap(&start_a, &start_b);
    if start_gap > MEDIAN_MATCH_TOLERANCE {
        return Err(Error::Setup(format!(
            "initial medians differ by {start_gap:.3e}; the comparison needs identical starts"
        )));
    }

    let mut cfg_a = cfg.cycle_config()?;
    cfg_a.jitter = a.jitter;
    let mut cfg_b = cfg.cycle_config()?;
    cfg_b.jitter = b.jitter;

    let mut taus = vec![0.0];
    let mut med_a = vec![start_a];
    let mut med_b = vec![start_b];
    for tau in 0..n_taus as u64 {
        let rec_a = run_cycle(&mut ens_a, &cfg_a, tau)?;
        let rec_b = run_cycle(&mut ens_b, &cfg_b, tau)?;
        taus.push((tau + 1) as f64);
        med_a.push(metastable_median(&rec_a, tt)?);
        med_b.push(metastable_median(&rec_b, tt)?);
    }

    let deviation: Vec<f64> = med_a
        .iter()
        .zip(&med_b)
        .map(|(x, y)| sup_gap(x, y))
        .collect();
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    let evolved = &deviation[1..];
    let rms_deviation = if evolved.is_empty() {
        0.0
    } else {
        (evolved.iter().map(|v| v * v).sum::<f64>() / evolved.len() as f64).sqrt()
    };
    Ok(PairOutcome { taus, med_a, med_b, deviation, max_deviation, rms_deviation })
}

/// CLT scaling of the composition deviation: the mean RMS deviation over a
/// seed ensemble should shrink by sqrt(2) when N doubles.
pub fn shrinkage_check(cfg: &RunConfig, seeds: usize) -> Result<ShrinkageSummary> {
    if seeds == 0 {
        return Err(Error::EmptyInput("shrinkage check needs at least one seed".into()));
    }
    let n = cfg.geometry()?.n_molecules;
    let align = cfg.wep.clone().unwrap_or_default().align_medians;
    let (base_a, base_b) = default_specs(cfg)?;
    let mut sum_base = 0.0;
    let mut sum_doubled = 0.0;
    for s in 0..seeds as u64 {
        let offset = 1000 * (s + 1);
        let a = SystemSpec { seed: base_a.seed.wrapping_add(offset), ..base_a.clone() };
        let b = SystemSpec { seed: base_b.seed.wrapping_add(offset), ..base_b.clone() };
        sum_base += run_pair(cfg, &a, &b, n, align)?.rms_deviation;
        sum_doubled += run_pair(cfg, &a, &b, 2 * n, align)?.rms_deviation;
    }
    let mean_rms_base = sum_base / seeds as f64;
    let mean_rms_doubled = sum_doubled / seeds as f64;
    let ratio = mean_rms_base / mean_rms_doubled;
    let expected = std::f64::consts::SQRT_2;
    Ok(ShrinkageSummary {
        n_base: n,
        n_doubled: 2 * n,
        seeds,
        mean_rms_base,
        mean_rms_doubled,
        ratio,
        expected,
        within_tolerance: (ratio / expected - 1.0).abs() <= 0.2,
    })
}

pub fn run(cfg: &RunConfig, artifacts: &mut ArtifactSet) -> Result<WepSummary> {
    let params = cfg.wep.clone().unwrap_or_default();
    let n = cfg.geometry()?.n_molecules;
    let d = cfg.geometry()?.d;
    let (spec_a, spec_b) = default_specs(cfg)?;
    let outcome = run_pair(cfg, &spec_a, &spec_b, n, params.align_medians)?;
    let swapped = run_pair(cfg, &spec_b, &spec_a, n, params.align_medians)?;
    let relabel_invariant = outcome.deviation == swapped.deviation;

    let clt_envelope = 5.0 / (n as f64).sqrt();
    let ideal_rate = (-params.c2 * (n as f64) * (n as f64)).exp();

    let mut columns: Vec<String> = vec!["tau".into()];
    for k in 0..d {
        columns.push(format!("median_a_x{k}"));
    }
    for k in 0..d {
        columns.push(format!("median_b_x{k}"));
    }
    columns.push("deviation".into());
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows: Vec<Vec<Cell>> = outcome
        .taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let mut row = vec![Cell::from(tau)];
            for k in 0..d {
                row.push(Cell::from(outcome.med_a[i][k]));
            }
            for k in 0..d {
                row.push(Cell::from(outcome.med_b[i][k]));
            }
            row.push(Cell::from(outcome.deviation[i]));
            row
        })
        .collect();
    artifacts.write_table("medians", &column_refs, &rows)?;

    let envelope_rows: Vec<Vec<Cell>> = outcome
        .taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            vec![
                Cell::from(tau),
                Cell::from(outcome.deviation[i]),
                Cell::from(clt_envelope),
                Cell::from(ideal_rate),
            ]
        })
        .collect();
    artifacts.write_table(
        "envelope",
        &["tau", "deviation", "clt_envelope", "ideal_rate"],
        &envelope_rows,
    )?;

    let shrinkage = if params.shrinkage_seeds > 0 {
        Some(shrinkage_check(cfg, params.shrinkage_seeds)?)
    } else {
        None
    };

    let summary = WepSummary {
        n_molecules: n,
        n_taus: params.n_taus,
        max_deviation: outcome.max_deviation,
        clt_envelope,
        pass: outcome.max_deviation < clt_envelope,
        relabel_invariant,
        ideal_rate,
        systems: vec![spec_a, spec_b],
        shrinkage,
    };
    artifacts.write_report("wep_report.json", &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::writers::OutputFormat;

    fn config(n: usize, extra: &str) -> RunConfig {
        let text = format!(
            r#"
scenario = "wep"

[geometry]
d = 2
n_molecules = {n}

[flow]
semi_period = 1.0

[dynamics]
dt = 0.03125

[ensemble]
seed = 21
sigma0 = 0.5

[wep]
{extra}
"#
        );
        let cfg = RunConfig::parse(&text).unwrap();
        cfg.validate().unwrap();
        cfg
    }

    #[test]
    fn identical_systems_identical_seeds_deviate_by_zero() {
        let cfg = config(120, "");
        let (a, _) = default_specs(&cfg).unwrap();
        let b = SystemSpec { label: "B".into(), ..a.clone() };
        let outcome = run_pair(&cfg, &a, &b, 120, true).unwrap();
        assert_eq!(outcome.max_deviation, 0.0);
    }

    #[test]
    fn default_pair_stays_inside_the_clt_envelope() {
        let cfg = config(500, "shrinkage_seeds = 0");
        let dir = tempfile::tempdir().unwrap();
        let mut artifacts = ArtifactSet::create(dir.path(), OutputFormat::Csv).unwrap();
        let summary = run(&cfg, &mut artifacts).unwrap();
        assert!(summary.pass, "deviation {} vs {}", summary.max_deviation, summary.clt_envelope);
        assert!(summary.relabel_invariant);
        assert!(summary.max_deviation > 0.0, "distinct compositions should not match bitwise");
        assert_eq!(summary.ideal_rate, 0.0, "exp(-N^2) underflows at N = 500");
    }

    #[test]
    fn misaligned_starts_are_a_setup_error() {
        let cfg = config(200, "align_medians = false");
        let (a, b) = default_specs(&cfg).unwrap();
        match run_pair(&cfg, &a, &b, 200, false) {
            Err(Error::Setup(msg)) => assert!(msg.contains("medians differ")),
            other => panic!("expected setup error, got {other:?}"),
        }
    }

    #[test]
    fn doubling_n_shrinks_the_deviation_by_sqrt2() {
        let cfg = config(250, "");
        let summary = shrinkage_check(&cfg, 6).unwrap();
        assert!(
            summary.within_tolerance,
            "ratio {} vs sqrt(2) = {}",
            summary.ratio,
            summary.expected
        );
    }
}
