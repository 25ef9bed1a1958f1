//! Molecule ensembles over the two-time lattice: fundamental cycles
//! (ergodic → contractive → expansive), world-line density histograms, and
//! emergent wave-function assembly with Born-rule normalization.
//!
//! A cycle covers internal time [0, 2T]. Up to the contraction onset the
//! ensemble random-walks under bounded jitter plus the attenuated drift; from
//! there to T every state is attracted to the coordinate-wise ensemble
//! median; past T the schedule mirrors back and jitter is re-injected.

use nalgebra::{Complex, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::dynamics::KinematicLimits;
use crate::error::{Error, Result};
use crate::flow::KappaSchedule;
use crate::geometry::{BetaField, PhasePoint};
use crate::rng::{molecule_stream, stream_rng};

/// N identical molecules, each carrying a per-molecule phase point of
/// dimension 2d (configuration (x, y) and momenta (p_x, p_y) stacked).
#[derive(Debug, Clone)]
pub struct MoleculeEnsemble {
    pub n: usize,
    pub d: usize,
    pub states: Vec<PhasePoint>,
    pub m_molecule: f64,
    pub m_system: f64,
    pub semi_period: f64,
    pub seed: u64,
}

impl MoleculeEnsemble {
    pub fn new(
        states: Vec<PhasePoint>,
        d: usize,
        m_molecule: f64,
        m_system: f64,
        semi_period: f64,
        seed: u64,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Setup("ensemble needs at least one molecule".into()));
        }
        if !(semi_period > 0.0) {
            return Err(Error::Setup(format!("semi-period must be positive, got {semi_period}")));
        }
        if m_system < m_molecule {
            return Err(Error::Setup(format!(
                "system mass {m_system} below molecule mass {m_molecule}"
            )));
        }
        let dim = 2 * d;
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::Shape(format!(
                "molecule state has dimension {}, expected {dim}",
                bad.dim()
            )));
        }
        Ok(Self { n: states.len(), d, states, m_molecule, m_system, semi_period, seed })
    }

    /// Gaussian position cloud around `center`, zero velocity coordinates,
    /// unit timelike momentum on each molecule.
    #[allow(clippy::too_many_arguments)]
    pub fn gaussian_cloud(
        n: usize,
        d: usize,
        center: &[f64],
        sigma: f64,
        m_molecule: f64,
        m_system: f64,
        semi_period: f64,
        seed: u64,
    ) -> Result<Self> {
        if center.len() != d {
            return Err(Error::Shape(format!(
                "center has dimension {}, expected {d}",
                center.len()
            )));
        }
        if !(sigma >= 0.0) {
            return Err(Error::Setup(format!("cloud width must be nonnegative, got {sigma}")));
        }
        let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Setup(e.to_string()))?;
        let states: Vec<PhasePoint> = (0..n)
            .map(|i| {
                let mut rng = stream_rng(seed, molecule_stream(0, i) | (1 << 63));
                let mut u = DVector::zeros(2 * d);
                for k in 0..d {
                    u[k] = center[k] + sigma * normal.sample(&mut rng);
                }
                let mut p = DVector::zeros(2 * d);
                p[0] = 1.0;
                PhasePoint { u, p }
            })
            .collect();
        Self::new(states, d, m_molecule, m_system, semi_period, seed)
    }

    /// Position blocks (the x sector of every molecule).
    pub fn positions(&self) -> Vec<DVector<f64>> {
        self.states
            .iter()
            .map(|s| DVector::from_iterator(self.d, (0..self.d).map(|k| s.u[k])))
            .collect()
    }
}

/// Per-step random displacement law for the ergodic and expansive phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum JitterLaw {
    None,
    Uniform { step: f64 },
    Gaussian { sigma: f64 },
}

impl JitterLaw {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            JitterLaw::None => 0.0,
            JitterLaw::Uniform { step } => rng.random_range(-*step..*step),
            JitterLaw::Gaussian { sigma } => {
                // Box-free draw through rand_distr keeps one sample per call.
                Normal::new(0.0, *sigma).map(|n| n.sample(rng)).unwrap_or(0.0)
            }
        }
    }
}

/// Configuration of one fundamental cycle run.
#[derive(Debug, Clone)]
pub struct CycleConfig {
    pub schedule: KappaSchedule,
    /// Per-molecule drift field over the 2d-dimensional block.
    pub beta: BetaField,
    /// Step count across the whole [0, 2T] window.
    pub steps: usize,
    pub jitter: JitterLaw,
    /// Contraction rate; the per-step attraction factor is
    /// exp(-lambda_c * kappa(t) * dt).
    pub lambda_c: f64,
    /// Fraction of [0, T] before the contraction onset.
    pub ergodic_fraction: f64,
    pub drift_factor: f64,
    pub limits: KinematicLimits,
    pub snapshot_every: usize,
}

impl CycleConfig {
    pub fn defaults(schedule: KappaSchedule, beta: BetaField) -> Self {
        let lambda_c = 5.0 / schedule.semi_period;
        Self {
            schedule,
            beta,
            steps: 64,
            jitter: JitterLaw::Gaussian { sigma: 0.01 },
            lambda_c,
            ergodic_fraction: 0.25,
            drift_factor: crate::dynamics::DEFAULT_DRIFT_FACTOR,
            limits: KinematicLimits::natural(),
            snapshot_every: 1,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Setup("cycle needs at least one step".into()));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Setup("snapshot cadence must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.ergodic_fraction) {
            return Err(Error::Setup(format!(
                "ergodic fraction must lie in [0, 1), got {}",
                self.ergodic_fraction
            )));
        }
        if self.lambda_c < 0.0 {
            return Err(Error::Setup(format!("contraction rate must be nonnegative, got {}", self.lambda_c)));
        }
        self.beta.validate(2 * d)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclePhase {
    Ergodic,
    Contractive,
    Expansive,
}

/// All molecule positions at one internal time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub phase: CyclePhase,
    pub positions: Vec<DVector<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseSpans {
    pub ergodic: (f64, f64),
    pub contractive: (f64, f64),
    pub expansive: (f64, f64),
}

/// Result of one fundamental cycle: phase spans, position snapshots, and the
/// end-of-phase position variances.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle_index: u64,
    pub spans: PhaseSpans,
    pub snapshots: Vec<Snapshot>,
    pub variance_ergodic_end: f64,
    pub variance_contracted_end: f64,
    pub variance_expansive_end: f64,
}

impl CycleRecord {
    /// (t, variance) curve over the stored snapshots.
    pub fn variance_curve(&self) -> Vec<(f64, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.t, position_variance(&s.positions)))
            .collect()
    }
}

/// Mean squared deviation from the coordinate means, averaged over molecules
/// and coordinates.
pub fn position_variance(positions: &[DVector<f64>]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let n = positions.len();
    let d = positions[0].len();
    let mut mean = DVector::zeros(d);
    for x in positions {
        mean += x;
    }
    mean /= n as f64;
    let mut acc = 0.0;
    for x in positions {
        let dev = x - &mean;
        acc += dev.norm_squared();
    }
    acc / (n * d) as f64
}

/// Coordinate-wise median of the positions (midpoint convention).
pub fn coordinate_median(positions: &[DVector<f64>]) -> Result<DVector<f64>> {
    if positions.is_empty() {
        return Err(Error::EmptyInput("median needs positions".into()));
    }
    let d = positions[0].len();
    let mut out = DVector::zeros(d);
    let mut column = Vec::with_capacity(positions.len());
    for k in 0..d {
        column.clear();
        column.extend(positions.iter().map(|x| x[k]));
        out[k] = crate::concentration::levy_mean(&column)?;
    }
    Ok(out)
}

/// Schedule over the full cycle window [0, 2T]: the outbound half uses
/// kappa(t), the return half mirrors it.
pub fn kappa_cycle(sched: &KappaSchedule, t: f64) -> Result<f64> {
    let tt = sched.semi_period;
    if t <= tt {
        sched.kappa(t)
    } else {
        sched.kappa(2.0 * tt - t)
    }
}

fn classify(t: f64, t_contract: f64, tt: f64) -> CyclePhase {
    if t < t_contract {
        CyclePhase::Ergodic
    } else if t <= tt {
        CyclePhase::Contractive
    } else {
        CyclePhase::Expansive
    }
}

/// Run one fundamental cycle in place, returning the phase-tagged record.
///
/// Per-molecule RNG streams are keyed by (cycle_index, molecule), so the
/// result is bitwise independent of the parallel schedule. Jitter and drift
/// displacements are clamped to the per-step kinematic bound c_max * dt; the
/// contraction map is a strict contraction and needs no clamp.
pub fn run_cycle(
    e: &mut MoleculeEnsemble,
    cfg: &CycleConfig,
    cycle_index: u64,
) -> Result<CycleRecord> {
    cfg.validate(e.d)?;
    let tt = cfg.schedule.semi_period;
    if (tt - e.semi_period).abs() > 1e-9 * tt.max(e.semi_period) {
        return Err(Error::Setup(format!(
            "schedule semi-period {tt} does not match ensemble semi-period {}",
            e.semi_period
        )));
    }
    let dt = 2.0 * tt / cfg.steps as f64;
    let t_contract = cfg.ergodic_fraction * tt;
    let d = e.d;
    let max_step = cfg.limits.c_max * dt;

    let mut rngs: Vec<ChaCha8Rng> = (0..e.n)
        .map(|i| stream_rng(e.seed, molecule_stream(cycle_index, i)))
        .collect();

    let initial_var = position_variance(&e.positions());
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        phase: classify(0.0, t_contract, tt),
        positions: e.positions(),
    }];
    let mut var_ergodic = initial_var;
    let mut var_contracted = initial_var;
    let mut var_expansive = initial_var;

    for step in 0..cfg.steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let t_end = (step as f64 + 1.0) * dt;
        let phase = classify(t_mid, t_contract, tt);
        let kappa = kappa_cycle(&cfg.schedule, t_mid)?;
        let scale = cfg.drift_factor * (1.0 - kappa);
        let shrink = (-cfg.lambda_c * kappa * dt).exp();
        let median = if phase == CyclePhase::Contractive && shrink < 1.0 {
            Some(coordinate_median(&e.positions())?)
        } else {
            None
        };

        e.states
            .par_iter_mut()
            .zip(rngs.par_iter_mut())
            .for_each(|(state, rng)| {
                let beta = cfg.beta.eval(&state.u);
                let jac = cfg.beta.jacobian(&state.u);
                let mut du = beta * (scale * dt);
                if phase != CyclePhase::Contractive {
                    for k in 0..d {
                        du[k] += cfg.jitter.draw(rng);
                    }
                }
                // kinematic clamp on the position displacement
                let dx_norm = du.rows(0, d).norm();
                if dx_norm > max_step {
                    let f = max_step / dx_norm;
                    for k in 0..d {
                        du[k] *= f;
                    }
                }
                state.u += du;
                state.p += jac.transpose() * &state.p * (-scale * dt);
                if let Some(med) = &median {
                    for k in 0..d {
                        state.u[k] = med[k] + (state.u[k] - med[k]) * shrink;
                    }
                }
            });

        let is_last = step + 1 == cfg.steps;
        let next_phase = if is_last {
            None
        } else {
            Some(classify((step as f64 + 1.5) * dt, t_contract, tt))
        };
        if next_phase != Some(phase) {
            let v = position_variance(&e.positions());
            match phase {
                CyclePhase::Ergodic => var_ergodic = v,
                CyclePhase::Contractive => var_contracted = v,
                CyclePhase::Expansive => var_expansive = v,
            }
        }
        if (step + 1) % cfg.snapshot_every == 0 || is_last {
            snapshots.push(Snapshot { t: t_end, phase, positions: e.positions() });
        }
    }

    Ok(CycleRecord {
        cycle_index,
        spans: PhaseSpans {
            ergodic: (0.0, t_contract),
            contractive: (t_contract, tt),
            expansive: (tt, 2.0 * tt),
        },
        snapshots,
        variance_ergodic_end: var_ergodic,
        variance_contracted_end: var_contracted,
        variance_expansive_end: var_expansive,
    })
}

/// Rectangular spatial grid with uniform spacing, row-major cell order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: f64, shape: Vec<usize>) -> Result<Self> {
        if origin.len() != shape.len() || shape.is_empty() {
            return Err(Error::Shape(format!(
                "grid origin dimension {} vs shape dimension {}",
                origin.len(),
                shape.len()
            )));
        }
        if !(spacing > 0.0) {
            return Err(Error::Setup(format!("grid spacing must be positive, got {spacing}")));
        }
        if shape.contains(&0) {
            return Err(Error::Setup("grid shape must have no zero extents".into()));
        }
        Ok(Self { origin, spacing, shape })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim() as i32)
    }

    /// Flattened cell index of a point, or None when outside the grid.
    pub fn cell_of(&self, x: &DVector<f64>) -> Option<usize> {
        let mut idx = 0usize;
        for k in 0..self.dim() {
            let rel = (x[k] - self.origin[k]) / self.spacing;
            if rel < 0.0 {
                return None;
            }
            let i = rel.floor() as usize;
            if i >= self.shape[k] {
                return None;
            }
            idx = idx * self.shape[k] + i;
        }
        Some(idx)
    }

    /// Center coordinates of a flattened cell index.
    pub fn center_of(&self, mut idx: usize) -> DVector<f64> {
        let d = self.dim();
        let mut coords = vec![0usize; d];
        for k in (0..d).rev() {
            coords[k] = idx % self.shape[k];
            idx /= self.shape[k];
        }
        DVector::from_fn(d, |k, _| {
            self.origin[k] + (coords[k] as f64 + 0.5) * self.spacing
        })
    }
}

/// World-line counts per cell, normalized so the values integrate to the
/// molecule count N.
#[derive(Debug, Clone)]
pub struct DensityField {
    grid: GridSpec,
    values: Vec<f64>,
    mass: f64,
}

impl DensityField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Total integral of the field. For histogram-built fields this is the
    /// exact molecule count (integer arithmetic before one division).
    pub fn total_mass(&self) -> f64 {
        self.mass
    }

    /// Wrap raw per-cell values; the mass is the discrete integral. No sign
    /// check here — corrupted fields are rejected at wave-function assembly.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} cells",
                values.len(),
                grid.len()
            )));
        }
        let vol = grid.cell_volume();
        let mass = kahan_sum(values.iter().map(|v| v * vol));
        Ok(Self { grid, values, mass })
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn slice_positions(record: &CycleRecord, t_slice: f64) -> Result<&Snapshot> {
    record
        .snapshots
        .iter()
        .min_by(|a, b| {
            (a.t - t_slice)
                .abs()
                .partial_cmp(&(b.t - t_slice).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or_else(|| Error::EmptyInput("cycle record has no snapshots".into()))
}

/// Histogram of molecule positions over the snapshot nearest to `t_slice` of
/// each record. Values are counts / (records · cell volume), so the field
/// integrates exactly to N.
pub fn density_field(
    records: &[CycleRecord],
    t_slice: f64,
    grid: &GridSpec,
) -> Result<DensityField> {
    if records.is_empty() {
        return Err(Error::EmptyInput("density field needs at least one record".into()));
    }
    let mut counts = vec![0u64; grid.len()];
    let mut escapees = Vec::new();
    let mut total: u64 = 0;
    for record in records {
        let snap = slice_positions(record, t_slice)?;
        for (i, x) in snap.positions.iter().enumerate() {
            match grid.cell_of(x) {
                Some(cell) => {
                    counts[cell] += 1;
                    total += 1;
                }
                None => escapees.push(i),
            }
        }
    }
    if !escapees.is_empty() {
        let count = escapees.len();
        escapees.truncate(8);
        return Err(Error::Coverage { count, first_ids: escapees });
    }
    let records_f = records.len() as f64;
    let vol = grid.cell_volume();
    let values = counts
        .iter()
        .map(|&c| c as f64 / (records_f * vol))
        .collect();
    Ok(DensityField { grid: grid.clone(), values, mass: total as f64 / records_f })
}

/// Phase-field model for wave-function assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PhaseModel {
    Constant { value: f64 },
    /// theta(x) = k . x evaluated at cell centers.
    PlaneWave { k: Vec<f64> },
    /// Explicit per-cell phases (e.g. cell-averaged molecule phases).
    Cellwise { thetas: Vec<f64> },
}

impl PhaseModel {
    fn theta(&self, grid: &GridSpec, cell: usize) -> Result<f64> {
        match self {
            PhaseModel::Constant { value } => Ok(*value),
            PhaseModel::PlaneWave { k } => {
                if k.len() != grid.dim() {
                    return Err(Error::Shape(format!(
                        "wave vector dimension {} vs grid dimension {}",
                        k.len(),
                        grid.dim()
                    )));
                }
                let c = grid.center_of(cell);
                Ok(k.iter().zip(c.iter()).map(|(a, b)| a * b).sum())
            }
            PhaseModel::Cellwise { thetas } => {
                if thetas.len() != grid.len() {
                    return Err(Error::Shape(format!(
                        "{} phases for a grid of {} cells",
                        thetas.len(),
                        grid.len()
                    )));
                }
                Ok(thetas[cell])
            }
        }
    }
}

/// Per-cell circular mean of independent uniform molecule phases, one stream
/// per (record, molecule). Cells never visited get phase 0.
pub fn random_molecule_phases(
    records: &[CycleRecord],
    t_slice: f64,
    grid: &GridSpec,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut re = vec![0.0f64; grid.len()];
    let mut im = vec![0.0f64; grid.len()];
    for (r, record) in records.iter().enumerate() {
        let snap = slice_positions(record, t_slice)?;
        for (i, x) in snap.positions.iter().enumerate() {
            if let Some(cell) = grid.cell_of(x) {
                let mut rng = stream_rng(seed, molecule_stream(r as u64, i));
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                re[cell] += phi.cos();
                im[cell] += phi.sin();
            }
        }
    }
    Ok(re
        .iter()
        .zip(&im)
        .map(|(&c, &s)| if c == 0.0 && s == 0.0 { 0.0 } else { s.atan2(c) })
        .collect())
}

/// Grid wave function with unit L2 norm.
#[derive(Debug, Clone)]
pub struct EmergentWaveFunction {
    grid: GridSpec,
    amplitudes: Vec<Complex<f64>>,
    norm_sq: f64,
}

impl EmergentWaveFunction {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex<f64>] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// psi(x) = sqrt(n2(x)/N) exp(i theta(x)). The square root of the normalized
/// histogram makes ||psi||^2 = 1 without a second normalization pass.
pub fn assemble_wavefunction(
    n2: &DensityField,
    phase: &PhaseModel,
) -> Result<EmergentWaveFunction> {
    if let Some((cell, &value)) = n2
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| v < 0.0 || !v.is_finite())
    {
        return Err(Error::DataCorruption { cell, value });
    }
    let mass = n2.total_mass();
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("density field has nonpositive mass {mass}")));
    }
    let grid = n2.grid().clone();
    let mut amplitudes = Vec::with_capacity(grid.len());
    for (cell, &v) in n2.values().iter().enumerate() {
        let r = (v / mass).sqrt();
        amplitudes.push(Complex::from_polar(r, phase.theta(&grid, cell)?));
    }
    let vol = grid.cell_volume();
    let norm_sq = kahan_sum(amplitudes.iter().map(|a| a.norm_sqr() * vol));
    Ok(EmergentWaveFunction { grid, amplitudes, norm_sq })
}

/// Discrete L2 inner product <a|b> = sum conj(a) b * cell volume.
pub fn inner_product(a: &EmergentWaveFunction, b: &EmergentWaveFunction) -> Result<Complex<f64>> {
    if a.grid != b.grid {
        return Err(Error::Shape("wave functions live on different grids".into()));
    }
    let vol = a.grid.cell_volume();
    let re = kahan_sum(
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x.conj() * y).re * vol),
    );
    let im = kahan_sum(
        a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x.conj() * y).im * vol),
    );
    Ok(Complex::new(re, im))
}

/// Semi-period from the mass relation T = alpha_et * hbar / (M c^2).
pub fn semi_period(m_system: f64, alpha_et: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(m_system > 0.0) {
        return Err(Error::Domain(format!("system mass must be positive, got {m_system}")));
    }
    if !(alpha_et > 0.0) {
        return Err(Error::Domain(format!("cycle constant must be positive, got {alpha_et}")));
    }
    Ok(alpha_et * constants.hbar / (m_system * constants.c * constants.c))
}

/// Maximal correlation distance 2 T c for a known semi-period.
pub fn correlation_bound_from_semi_period(semi_period: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(semi_period > 0.0) {
        return Err(Error::Domain(format!("semi-period must be positive, got {semi_period}")));
    }
    Ok(2.0 * semi_period * constants.c)
}

/// Mass form 2 alpha_et hbar / (c M); massless systems are unbounded.
pub fn correlation_bound_from_mass(
    m_system: f64,
    alpha_et: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if m_system < 0.0 {
        return Err(Error::Domain(format!("system mass must be nonnegative, got {m_system}")));
    }
    if !(alpha_et > 0.0) {
        return Err(Error::Domain(format!("cycle constant must be positive, got {alpha_et}")));
    }
    if m_system == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * alpha_et * constants.hbar / (constants.c * m_system))
}
