//! Concentration of measure: empirical deviation fractions around the Lévy
//! mean against closed-form tail bounds, high-dimensional samplers, and the
//! collapse metrics read off fundamental-cycle records.
//!
//! Conventions. The defining concentration function alpha is one-sided; the
//! empirical estimate counts two-sided deviations |f - median| > rho, so
//! reports carry both the raw fraction and alpha = fraction / 2.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensemble::{CyclePhase, CycleRecord};
use crate::error::{Error, Result};
use crate::rng::chunked;

/// Median with the midpoint convention on even counts.
pub fn levy_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("median of an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    if m % 2 == 1 {
        Ok(sorted[m / 2])
    } else {
        Ok(0.5 * (sorted[m / 2 - 1] + sorted[m / 2]))
    }
}

/// Closed-form tail bounds for 1-Lipschitz observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailBound {
    /// Uniform measure on the unit sphere of the given ambient dimension
    /// (the sphere S^{n-1}); deviations are geodesic-comparable, rho in (0, 1).
    Sphere { ambient_dim: usize },
    /// Gaussian-type bound with characteristic dispersion rho_p.
    Gaussian { rho_p: f64 },
    /// System-scale bound for an N-molecule ensemble, evaluated at deviations
    /// measured in units of the system scale (rho = 1 is the natural point).
    HrScale { n_molecules: usize },
}

impl TailBound {
    /// Evaluate the bound at deviation rho.
    pub fn bound(&self, rho: f64) -> Result<f64> {
        match self {
            TailBound::Sphere { ambient_dim } => {
                let n = *ambient_dim;
                if n < 2 {
                    return Err(Error::Domain(format!(
                        "sphere bound needs ambient dimension >= 2, got {n}"
                    )));
                }
                if !(0.0 < rho && rho < 1.0) {
                    return Err(Error::Domain(format!(
                        "sphere bound needs rho in (0, 1), got {rho}"
                    )));
                }
                Ok((std::f64::consts::PI / 2.0).sqrt()
                    * (-rho * rho * (n as f64 - 1.0) / 2.0).exp())
            }
            TailBound::Gaussian { rho_p } => {
                if !(*rho_p > 0.0) {
                    return Err(Error::Domain(format!(
                        "gaussian bound needs rho_p > 0, got {rho_p}"
                    )));
                }
                if !(rho > 0.0) {
                    return Err(Error::Domain(format!(
                        "gaussian bound needs rho > 0, got {rho}"
                    )));
                }
                Ok(0.5 * (-rho * rho / (2.0 * rho_p * rho_p)).exp())
            }
            TailBound::HrScale { n_molecules } => {
                let n = *n_molecules;
                if n < 1 {
                    return Err(Error::Domain("system bound needs at least one molecule".into()));
                }
                if !(rho > 0.0) {
                    return Err(Error::Domain(format!(
                        "system bound needs rho > 0, got {rho}"
                    )));
                }
                let nf = n as f64;
                Ok(0.5 * (-32.0 * nf * nf * rho * rho).exp())
            }
        }
    }
}

/// Empirical concentration of one scalar observable against a tail bound.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub rho_grid: Vec<f64>,
    /// Raw two-sided fractions mu(|f - median| > rho).
    pub deviation_fraction: Vec<f64>,
    /// One-sided estimates, deviation_fraction / 2.
    pub alpha_empirical: Vec<f64>,
    pub bound: Vec<f64>,
    /// Statistical margin 3 sqrt(p (1 - p) / M) on the alpha estimate.
    pub margin: Vec<f64>,
    /// alpha_empirical <= bound + margin, per grid point.
    pub pass: Vec<bool>,
    pub levy_mean: f64,
    pub sigma_f: f64,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl ConcentrationReport {
    pub fn all_pass(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }
}

/// Compare the deviation fractions of pre-evaluated observable values
/// against a tail bound over a grid of deviations.
pub fn empirical_concentration(
    values: &[f64],
    rho_grid: &[f64],
    bound: &TailBound,
) -> Result<ConcentrationReport> {
    if values.is_empty() {
        return Err(Error::EmptyInput("concentration needs observable samples".into()));
    }
    if rho_grid.is_empty() {
        return Err(Error::EmptyInput("concentration needs a deviation grid".into()));
    }
    if rho_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("deviation grid must be strictly increasing".into()));
    }
    let median = levy_mean(values)?;
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sigma_f = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m).sqrt();

    let mut deviation_fraction = Vec::with_capacity(rho_grid.len());
    let mut alpha_empirical = Vec::with_capacity(rho_grid.len());
    let mut bounds = Vec::with_capacity(rho_grid.len());
    let mut margins = Vec::with_capacity(rho_grid.len());
    let mut pass = Vec::with_capacity(rho_grid.len());
    for &rho in rho_grid {
        let exceed = values.iter().filter(|&&v| (v - median).abs() > rho).count();
        let fraction = exceed as f64 / m;
        let alpha = fraction / 2.0;
        let b = bound.bound(rho)?;
        let margin = 3.0 * (alpha * (1.0 - alpha) / m).sqrt();
        deviation_fraction.push(fraction);
        alpha_empirical.push(alpha);
        bounds.push(b);
        margins.push(margin);
        pass.push(alpha <= b + margin);
    }

    let mut notes = vec![
        "alpha_empirical is half the two-sided deviation fraction (one-sided convention)"
            .to_string(),
    ];
    if let TailBound::Sphere { .. } = bound {
        notes.push(format!(
            "spherical prefactor sqrt(pi/2) = {:.6}; the sharper sqrt(pi/8) = {:.6} variant scales every bound by 1/2",
            (std::f64::consts::PI / 2.0).sqrt(),
            (std::f64::consts::PI / 8.0).sqrt()
        ));
    }

    Ok(ConcentrationReport {
        rho_grid: rho_grid.to_vec(),
        deviation_fraction,
        alpha_empirical,
        bound: bounds,
        margin: margins,
        pass,
        levy_mean: median,
        sigma_f,
        samples: values.len(),
        notes,
    })
}

fn normal_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| StandardNormal.sample(rng))
}

/// Uniform samples on the sphere S^dim inside R^{dim+1} (normalized
/// Gaussians), deterministic per seed and independent of thread count.
pub fn sample_sphere(sphere_dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let ambient = sphere_dim + 1;
    chunked(seed, count, |rng, n| {
        (0..n)
            .map(|_| loop {
                let v = normal_vector(rng, ambient);
                let norm = v.norm();
                if norm > 0.0 {
                    break v / norm;
                }
            })
            .collect()
    })
}

/// Evaluate an observable over streamed sphere samples without keeping the
/// sample set in memory.
pub fn sphere_function_samples<F>(sphere_dim: usize, count: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    let ambient = sphere_dim + 1;
    chunked(seed, count, |rng, n| {
        (0..n)
            .map(|_| {
                let v = loop {
                    let v = normal_vector(rng, ambient);
                    let norm = v.norm();
                    if norm > 0.0 {
                        break v / norm;
                    }
                };
                f(&v)
            })
            .collect()
    })
}

/// Evaluate an observable over streamed standard-Gaussian samples.
pub fn gaussian_function_samples<F>(dim: usize, count: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    chunked(seed, count, |rng, n| {
        (0..n).map(|_| f(&normal_vector(rng, dim))).collect()
    })
}

/// Largest observed difference quotient over all point pairs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LipschitzEstimate {
    pub constant: f64,
    pub pairs_used: usize,
    pub skipped_coincident: usize,
}

/// Empirical Lipschitz constant of pre-evaluated values over all pairs of the
/// given points; coincident pairs are skipped and counted.
pub fn empirical_lipschitz<D>(
    values: &[f64],
    points: &[DVector<f64>],
    distance: D,
) -> Result<LipschitzEstimate>
where
    D: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    if points.len() != values.len() {
        return Err(Error::Shape(format!(
            "{} values for {} points",
            values.len(),
            points.len()
        )));
    }
    if points.len() < 2 {
        return Err(Error::EmptyInput("Lipschitz estimate needs at least two points".into()));
    }
    let mut constant = 0.0f64;
    let mut pairs_used = 0usize;
    let mut skipped = 0usize;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = distance(&points[i], &points[j]);
            if d == 0.0 {
                skipped += 1;
                continue;
            }
            constant = constant.max((values[i] - values[j]).abs() / d);
            pairs_used += 1;
        }
    }
    Ok(LipschitzEstimate { constant, pairs_used, skipped_coincident: skipped })
}

/// Collapse diagnostics of one fundamental cycle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CollapseReport {
    pub variance_ergodic: f64,
    pub variance_contracted: f64,
    pub variance_expansive: f64,
    /// Contracted position spread in units of the observable dispersion.
    pub spread_over_sigma: f64,
    pub collapsed: bool,
    /// Deviation scale of the N-molecule system in subquantum units.
    pub rho_over_rho_p: f64,
}

/// Read the collapse verdict off a cycle record: the contracted spread must
/// fall below `threshold` observable dispersions. A record without a
/// contractive phase never collapses.
pub fn collapse_metrics(
    record: &CycleRecord,
    sigma_f: f64,
    threshold: f64,
) -> Result<CollapseReport> {
    if !(sigma_f > 0.0) {
        return Err(Error::Domain(format!("observable dispersion must be positive, got {sigma_f}")));
    }
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("collapse threshold must be positive, got {threshold}")));
    }
    let first = record
        .snapshots
        .first()
        .ok_or_else(|| Error::Setup("cycle record has no snapshots".into()))?;
    let n = first.positions.len();
    let has_contraction = record
        .snapshots
        .iter()
        .any(|s| s.phase == CyclePhase::Contractive);
    let spread = record.variance_contracted_end.max(0.0).sqrt();
    let spread_over_sigma = spread / sigma_f;
    Ok(CollapseReport {
        variance_ergodic: record.variance_ergodic_end,
        variance_contracted: record.variance_contracted_end,
        variance_expansive: record.variance_expansive_end,
        spread_over_sigma,
        collapsed: has_contraction && spread_over_sigma < threshold,
        rho_over_rho_p: n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{run_cycle, CycleConfig, JitterLaw, MoleculeEnsemble};
    use crate::flow::KappaSchedule;
    use crate::geometry::BetaField;
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn levy_mean_midpoint_convention() {
        assert_eq!(levy_mean(&[3.0]).unwrap(), 3.0);
        assert_eq!(levy_mean(&[1.0, 2.0, 9.0]).unwrap(), 2.0);
        assert_eq!(levy_mean(&[1.0, 2.0, 3.0, 10.0]).unwrap(), 2.5);
        assert_eq!(levy_mean(&[10.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert!(levy_mean(&[]).is_err());
        // shift equivariance
        let xs = [0.3, -1.2, 4.5, 0.9, 2.2];
        let shifted: Vec<f64> = xs.iter().map(|x| x + 10.0).collect();
        assert_relative_eq!(
            levy_mean(&shifted).unwrap(),
            levy_mean(&xs).unwrap() + 10.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn tail_bounds_closed_forms() {
        let s = TailBound::Sphere { ambient_dim: 100 };
        let b = s.bound(0.3).unwrap();
        assert_relative_eq!(b, (std::f64::consts::PI / 2.0).sqrt() * (-4.455f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(b, 0.0145637, max_relative = 1e-4);

        let g = TailBound::Gaussian { rho_p: 1.0 };
        assert_relative_eq!(g.bound(1.0).unwrap(), 0.30326533, max_relative = 1e-7);
        // scale invariance in rho/rho_p
        let g2 = TailBound::Gaussian { rho_p: 0.25 };
        assert_relative_eq!(g2.bound(0.25).unwrap(), 0.30326533, max_relative = 1e-7);

        let h = TailBound::HrScale { n_molecules: 1 };
        assert_relative_eq!(h.bound(1.0).unwrap(), 6.33219e-15, max_relative = 1e-4);
        // growing ensembles concentrate catastrophically faster
        let h2 = TailBound::HrScale { n_molecules: 2 };
        assert!(h2.bound(1.0).unwrap() < h.bound(1.0).unwrap() * 1e-40);
    }

    #[test]
    fn tail_bound_domain_validation() {
        assert!(TailBound::Sphere { ambient_dim: 1 }.bound(0.5).is_err());
        assert!(TailBound::Sphere { ambient_dim: 10 }.bound(0.0).is_err());
        assert!(TailBound::Sphere { ambient_dim: 10 }.bound(1.0).is_err());
        assert!(TailBound::Sphere { ambient_dim: 10 }.bound(1.5).is_err());
        assert!(TailBound::Gaussian { rho_p: 0.0 }.bound(0.5).is_err());
        assert!(TailBound::Gaussian { rho_p: -1.0 }.bound(0.5).is_err());
        assert!(TailBound::Gaussian { rho_p: 1.0 }.bound(0.0).is_err());
        assert!(TailBound::HrScale { n_molecules: 0 }.bound(1.0).is_err());
        assert!(TailBound::HrScale { n_molecules: 3 }.bound(-1.0).is_err());
    }

    #[test]
    fn gaussian_first_coordinate_concentrates() {
        // f = x_1 of a standard Gaussian: dispersion scale rho_p = 1
        let values = gaussian_function_samples(50, 20_000, 14, |v| v[0]);
        let grid = [1.0, 2.0, 3.0];
        let rep =
            empirical_concentration(&values, &grid, &TailBound::Gaussian { rho_p: 1.0 }).unwrap();
        assert!(rep.all_pass(), "alpha {:?} vs bound {:?}", rep.alpha_empirical, rep.bound);
        // two-sided fractions near the normal-tail oracle 2(1 - Phi(rho))
        for (f, oracle) in rep.deviation_fraction.iter().zip([0.3173, 0.0455, 0.0027]) {
            assert!((f - oracle).abs() < 0.02, "fraction {f} vs {oracle}");
        }
    }

    #[test]
    fn constant_shift_leaves_fractions_unchanged() {
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let shifted: Vec<f64> = values.iter().map(|v| v + 1000.0).collect();
        let bound = TailBound::Gaussian { rho_p: 10.0 };
        let a = empirical_concentration(&values, &[2.5, 4.0], &bound).unwrap();
        let b = empirical_concentration(&shifted, &[2.5, 4.0], &bound).unwrap();
        assert_eq!(a.deviation_fraction, b.deviation_fraction);
        assert_eq!(b.levy_mean, 1004.5);

        let noise = gaussian_function_samples(3, 3_000, 6, |v| v[0] * 0.7 + v[1]);
        let noise_shift: Vec<f64> = noise.iter().map(|v| v + 64.0).collect();
        let a = empirical_concentration(&noise, &[0.5, 1.0], &bound).unwrap();
        let b = empirical_concentration(&noise_shift, &[0.5, 1.0], &bound).unwrap();
        assert_eq!(a.deviation_fraction, b.deviation_fraction);
    }

    #[test]
    fn tail_bounds_decrease_in_dimension() {
        let spheres: Vec<f64> = [10, 20, 50, 100]
            .iter()
            .map(|&n| TailBound::Sphere { ambient_dim: n }.bound(0.3).unwrap())
            .collect();
        assert!(spheres.windows(2).all(|w| w[1] < w[0]), "{spheres:?}");
        let systems: Vec<f64> = (1..4)
            .map(|n| TailBound::HrScale { n_molecules: n }.bound(1.0).unwrap())
            .collect();
        assert!(systems.windows(2).all(|w| w[1] < w[0]), "{systems:?}");
    }

    #[test]
    fn tail_bounds_decrease_along_rho() {
        let grids = [
            (TailBound::Sphere { ambient_dim: 50 }, vec![0.05, 0.1, 0.2, 0.4, 0.8]),
            (TailBound::Gaussian { rho_p: 0.7 }, vec![0.1, 0.5, 1.0, 2.0, 5.0]),
            (TailBound::HrScale { n_molecules: 2 }, vec![0.1, 0.2, 0.3]),
        ];
        for (bound, grid) in grids {
            let vals: Vec<f64> = grid.iter().map(|&r| bound.bound(r).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{bound:?}: {vals:?}");
        }
    }

    #[test]
    fn deviation_fractions_exact_small_case() {
        let values: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let bound = TailBound::Gaussian { rho_p: 10.0 };
        let rep = empirical_concentration(&values, &[2.5, 4.0], &bound).unwrap();
        assert_eq!(rep.levy_mean, 4.5);
        // |x - 4.5| > 2.5 for x in {0, 1, 8, 9}
        assert_eq!(rep.deviation_fraction[0], 0.4);
        assert_eq!(rep.alpha_empirical[0], 0.2);
        // |x - 4.5| > 4.0 for x in {0, 9}
        assert_eq!(rep.deviation_fraction[1], 0.2);
        assert_eq!(rep.samples, 10);
    }

    #[test]
    fn uniform_interval_identity_oracle() {
        // f = x on U[0, 1]: median 1/2, P(|x - 1/2| > 1/4) = 1/2 analytically
        let mut rng = stream_rng(31, 0);
        let values: Vec<f64> = (0..40_000).map(|_| rng.random_range(0.0..1.0)).collect();
        let rep = empirical_concentration(&values, &[0.25], &TailBound::Gaussian { rho_p: 1.0 }).unwrap();
        assert!((rep.deviation_fraction[0] - 0.5).abs() < 0.02, "{}", rep.deviation_fraction[0]);
        assert!((rep.levy_mean - 0.5).abs() < 0.01);
        assert!((rep.sigma_f - (1.0f64 / 12.0).sqrt()).abs() < 0.01);
    }

    #[test]
    fn deviation_fraction_is_nonincreasing() {
        let values: Vec<f64> =
            gaussian_function_samples(4, 5_000, 3, |v| v.iter().sum::<f64>() / 2.0);
        let grid = [0.1, 0.3, 0.6, 1.0, 1.5, 2.5];
        let rep = empirical_concentration(&values, &grid, &TailBound::Gaussian { rho_p: 1.0 }).unwrap();
        assert!(rep
            .deviation_fraction
            .windows(2)
            .all(|w| w[1] <= w[0]));
        assert!(rep.notes.iter().any(|n| n.contains("one-sided")));
    }

    #[test]
    fn sphere_samples_normalized_with_exact_moments() {
        let pts = sample_sphere(3, 20_000, 5);
        assert_eq!(pts.len(), 20_000);
        for p in pts.iter().take(100) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert_eq!(p.len(), 4);
        }
        // E[x_1^2] = 1/(dim+1) on S^dim
        let second: f64 = pts.iter().map(|p| p[0] * p[0]).sum::<f64>() / pts.len() as f64;
        assert!((second - 0.25).abs() < 0.01, "second moment {second}");
        let first: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
        assert!(first.abs() < 0.01);
    }

    #[test]
    fn samplers_are_deterministic() {
        let a = sample_sphere(5, 300, 99);
        let b = sample_sphere(5, 300, 99);
        assert_eq!(a, b);
        let c = sample_sphere(5, 300, 100);
        assert_ne!(a, c);
        let fa = sphere_function_samples(5, 300, 99, |v| v[0]);
        for (p, &f) in a.iter().zip(&fa) {
            assert_eq!(p[0].to_bits(), f.to_bits());
        }
        let ga = gaussian_function_samples(7, 300, 1, |v| v[1]);
        let gb = gaussian_function_samples(7, 300, 1, |v| v[1]);
        assert_eq!(ga, gb);
    }

    #[test]
    fn coordinate_on_sphere_concentrates_under_bound() {
        let values = sphere_function_samples(9, 20_000, 8, |v| v[0]);
        let rep = empirical_concentration(
            &values,
            &[0.3, 0.5],
            &TailBound::Sphere { ambient_dim: 10 },
        )
        .unwrap();
        assert!(rep.all_pass(), "alpha {:?} vs bound {:?}", rep.alpha_empirical, rep.bound);
        assert!(rep.notes.iter().any(|n| n.contains("sqrt(pi/8)")));
        // the raw fraction really does exceed alpha
        for (f, a) in rep.deviation_fraction.iter().zip(&rep.alpha_empirical) {
            assert_eq!(*a, f / 2.0);
        }
    }

    #[test]
    fn linear_function_lipschitz_estimate() {
        let mut rng = stream_rng(12, 0);
        let mut points: Vec<DVector<f64>> = (0..200)
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let values: Vec<f64> = points.iter().map(|p| 3.0 * p[0]).collect();
        let est = empirical_lipschitz(&values, &points, |a, b| (a - b).norm()).unwrap();
        assert!(est.constant <= 3.0 + 1e-12, "estimate {}", est.constant);
        assert!(est.constant > 2.9, "estimate {}", est.constant);
        assert_eq!(est.skipped_coincident, 0);

        // coincident points are skipped, not divided by zero
        let dup = points[0].clone();
        points.push(dup);
        let mut values = values;
        values.push(3.0 * points[200][0]);
        let est = empirical_lipschitz(&values, &points, |a, b| (a - b).norm()).unwrap();
        assert!(est.skipped_coincident >= 1);
        assert!(est.constant.is_finite());
    }

    #[test]
    fn collapse_metrics_from_cycle_records() {
        let sched = KappaSchedule::smoothstep(1.0).unwrap();
        let cfg = CycleConfig::defaults(sched, BetaField::zero(4));
        let mut e =
            MoleculeEnsemble::gaussian_cloud(200, 2, &[0.0, 0.0], 0.5, 1.0, 200.0, 1.0, 21).unwrap();
        let rec = run_cycle(&mut e, &cfg, 0).unwrap();
        let rep = collapse_metrics(&rec, 0.5, 1.0).unwrap();
        assert!(rep.collapsed, "spread/sigma = {}", rep.spread_over_sigma);
        assert_eq!(rep.rho_over_rho_p, 200.0);
        assert!(rep.variance_contracted < rep.variance_ergodic);

        // a tiny dispersion scale makes the same record fail the threshold
        let strict = collapse_metrics(&rec, 1e-6, 1.0).unwrap();
        assert!(!strict.collapsed);

        // contraction disabled: spread survives, no collapse
        let mut cfg_off = CycleConfig::defaults(sched, BetaField::zero(4));
        cfg_off.lambda_c = 0.0;
        cfg_off.jitter = JitterLaw::None;
        let mut e2 =
            MoleculeEnsemble::gaussian_cloud(200, 2, &[0.0, 0.0], 0.5, 1.0, 200.0, 1.0, 21).unwrap();
        let rec2 = run_cycle(&mut e2, &cfg_off, 0).unwrap();
        let rep2 = collapse_metrics(&rec2, 0.5, 1.0).unwrap();
        assert!(!rep2.collapsed);
        assert_relative_eq!(rep2.variance_contracted, rep2.variance_ergodic, max_relative = 1e-12);

        assert!(collapse_metrics(&rec, 0.0, 1.0).is_err());
        assert!(collapse_metrics(&rec, 1.0, 0.0).is_err());
    }
}
