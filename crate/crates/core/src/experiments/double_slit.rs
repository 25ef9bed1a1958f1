//! Double-slit scenario: two single-slit transport runs assembled into wave
//! functions and superposed with a unit-norm constant, plus a two-time
//! alternation run whose internal-time marginal is emitted alongside. The
//! superposition and the marginal are both data; the scenario records their
//! L1 gap without judging it.

use nalgebra::{Complex, DVector};
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::ensemble::{
    assemble_wavefunction, density_field, inner_product, run_cycle, CycleRecord, DensityField,
    EmergentWaveFunction, GridSpec, JitterLaw, MoleculeEnsemble, PhaseModel,
};
use crate::error::{Error, Result};
use crate::geometry::{BetaField, PhasePoint};
use crate::rng::{molecule_stream, stream_rng};

use super::config::{DoubleSlitBlock, RunConfig};
use super::writers::{ArtifactSet, Cell};

/// Local maxima below this fraction of the global maximum are treated as
/// noise, not fringes.
const PEAK_FLOOR: f64 = 0.3;
/// A local maximum only counts as a fringe crest when the profile dips at
/// least this fraction of the global maximum on the way to any higher point.
/// Counting noise on a smooth envelope never digs troughs that deep, so a
/// single-slit profile reports exactly zero visibility.
const PROMINENCE_FLOOR: f64 = 0.3;
/// Rows on each side of the screen line averaged into the reported
/// intensity. The transported cloud varies slowly along the flight axis, so
/// the band trades no fringe contrast for a lower counting-noise floor.
const SCREEN_HALF_BAND: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SlitMode {
    Both,
    AOnly,
    BOnly,
}

impl SlitMode {
    fn parse(text: &str) -> Result<Self> {
        match text {
            "both" => Ok(SlitMode::Both),
            "a_only" => Ok(SlitMode::AOnly),
            "b_only" => Ok(SlitMode::BOnly),
            other => Err(Error::Config {
                path: "double_slit.slits".into(),
                message: format!("unknown slit selection '{other}'"),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleSlitSummary {
    pub slits: String,
    pub phase_model: String,
    pub n_molecules: usize,
    pub separation: f64,
    pub slit_width: f64,
    pub screen_distance: f64,
    pub k_eff: f64,
    /// Drift speed chosen so the cycle lands the cloud on the screen line.
    pub drift_velocity: f64,
    pub lambda_eff: f64,
    pub fringe_spacing_analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe_spacing_measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe_rel_error: Option<f64>,
    /// Mean adjacent-extrema contrast on the screen line; 0 when the line
    /// carries no secondary fringe peaks.
    pub visibility: f64,
    pub screen_row_y: f64,
    /// |column sum A - column sum B| / mean on the midline; None with one
    /// slit closed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub midline_asymmetry: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_im: Option<f64>,
    /// L1 distance between the superposed density and the normalized
    /// two-time marginal / end-slice densities.
    pub l1_gap_marginal: f64,
    pub l1_gap_end: f64,
    pub norm_sq_superposed: f64,
}

fn slit_centers(block: &DoubleSlitBlock) -> ([f64; 2], [f64; 2]) {
    ([-0.5 * block.separation, 0.0], [0.5 * block.separation, 0.0])
}

fn require_inside(grid: &GridSpec, x: f64, y: f64, what: &str) -> Result<()> {
    let point = DVector::from_vec(vec![x, y]);
    if grid.cell_of(&point).is_none() {
        return Err(Error::Setup(format!(
            "{what} at ({x}, {y}) lies outside the density grid"
        )));
    }
    Ok(())
}

fn check_geometry(grid: &GridSpec, block: &DoubleSlitBlock) -> Result<()> {
    let (a, b) = slit_centers(block);
    for (center, name) in [(a, "slit A aperture"), (b, "slit B aperture")] {
        require_inside(grid, center[0] - block.slit_width, center[1], name)?;
        require_inside(grid, center[0] + block.slit_width, center[1], name)?;
    }
    require_inside(grid, 0.0, block.screen_distance, "screen line")?;
    Ok(())
}

/// Phase field of a spherical wavelet emitted at the slit: theta = k_eff r.
fn point_source_phases(grid: &GridSpec, slit: &[f64; 2], k_eff: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|cell| {
            let c = grid.center_of(cell);
            let dx = c[0] - slit[0];
            let dy = c[1] - slit[1];
            k_eff * (dx * dx + dy * dy).sqrt()
        })
        .collect()
}

fn phase_model(grid: &GridSpec, block: &DoubleSlitBlock, slit: &[f64; 2]) -> Result<PhaseModel> {
    match block.phase.as_str() {
        "point_source" => Ok(PhaseModel::Cellwise {
            thetas: point_source_phases(grid, slit, block.k_eff),
        }),
        "constant" => Ok(PhaseModel::Constant { value: 0.0 }),
        other => Err(Error::Config {
            path: "double_slit.phase".into(),
            message: format!("unknown phase model '{other}'"),
        }),
    }
}

/// Transport configuration: pure drift toward the screen plus transverse
/// jitter; the contraction interaction stays off during passage.
fn transport_cycle(
    cfg: &RunConfig,
    block: &DoubleSlitBlock,
    snapshot_every: usize,
) -> Result<(crate::ensemble::CycleConfig, f64)> {
    let tt = cfg.flow()?.semi_period;
    let mut cycle = cfg.cycle_config()?;
    let v = block.screen_distance / (cycle.drift_factor * tt);
    cycle.beta = BetaField::Constant { values: vec![0.0, v, 0.0, 0.0] };
    cycle.jitter = JitterLaw::Gaussian { sigma: block.jitter_sigma };
    cycle.lambda_c = 0.0;
    cycle.snapshot_every = snapshot_every;
    Ok((cycle, v))
}

fn slit_cloud(
    n: usize,
    centers: &[[f64; 2]],
    width: f64,
    semi_period: f64,
    seed: u64,
) -> Result<MoleculeEnsemble> {
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Setup(e.to_string()))?;
    let states: Vec<PhasePoint> = (0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, molecule_stream(0, i) | (1 << 63));
            let c = centers[i % centers.len()];
            let mut u = DVector::zeros(4);
            u[0] = c[0] + width * normal.sample(&mut rng);
            u[1] = c[1] + width * normal.sample(&mut rng);
            let mut p = DVector::zeros(4);
            p[0] = 1.0;
            PhasePoint { u, p }
        })
        .collect();
    MoleculeEnsemble::new(states, 2, 1.0, n as f64, semi_period, seed)
}

/// Histogram over every stored snapshot: the projection (t, tau) -> tau of
/// the alternation run's world lines.
fn marginal_density(record: &CycleRecord, grid: &GridSpec) -> Result<DensityField> {
    let mut counts = vec![0u64; grid.len()];
    let mut escapees = Vec::new();
    for snap in &record.snapshots {
        for (i, x) in snap.positions.iter().enumerate() {
            match grid.cell_of(x) {
                Some(cell) => counts[cell] += 1,
                None => escapees.push(i),
            }
        }
    }
    if !escapees.is_empty() {
        let count = escapees.len();
        escapees.truncate(8);
        return Err(Error::Coverage { count, first_ids: escapees });
    }
    let slices = record.snapshots.len() as f64;
    let vol = grid.cell_volume();
    let values = counts.iter().map(|&c| c as f64 / (slices * vol)).collect();
    DensityField::from_values(grid.clone(), values)
}

fn single_slit_wavefunction(
    cfg: &RunConfig,
    block: &DoubleSlitBlock,
    grid: &GridSpec,
    slit: &[f64; 2],
    seed: u64,
) -> Result<EmergentWaveFunction> {
    let tt = cfg.flow()?.semi_period;
    let n = cfg.geometry()?.n_molecules;
    let steps = cfg.steps_per_cycle()?;
    let (cycle, _) = transport_cycle(cfg, block, steps)?;
    let mut ensemble = slit_cloud(n, &[*slit], block.slit_width, tt, seed)?;
    let record = run_cycle(&mut ensemble, &cycle, 0)?;
    let n2 = density_field(&[record], 2.0 * tt, grid)?;
    assemble_wavefunction(&n2, &phase_model(grid, block, slit)?)
}

fn superpose(
    a: Option<&EmergentWaveFunction>,
    b: Option<&EmergentWaveFunction>,
    grid: &GridSpec,
) -> Result<(Vec<f64>, f64)> {
    let zero = Complex::new(0.0, 0.0);
    let len = grid.len();
    let vol = grid.cell_volume();
    let sums: Vec<Complex<f64>> = (0..len)
        .map(|i| {
            a.map_or(zero, |w| w.amplitudes()[i]) + b.map_or(zero, |w| w.amplitudes()[i])
        })
        .collect();
    let norm_sq: f64 = sums.iter().map(|c| c.norm_sqr() * vol).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::Domain(format!("superposition has nonpositive norm {norm_sq}")));
    }
    let scale = 1.0 / norm_sq;
    Ok((sums.iter().map(|c| c.norm_sqr() * scale).collect(), norm_sq))
}

fn l1_gap(p: &[f64], field: &DensityField) -> f64 {
    let mass = field.total_mass();
    let vol = field.grid().cell_volume();
    p.iter()
        .zip(field.values())
        .map(|(&pi, &qi)| (pi - qi / mass).abs() * vol)
        .sum()
}

/// Topographic prominence: height above the highest saddle separating the
/// peak from higher ground (or from the array edge).
fn peak_prominence(v: &[f64], peak: usize) -> f64 {
    let h = v[peak];
    let mut left_base = h;
    let mut i = peak;
    while i > 0 {
        i -= 1;
        if v[i] > h {
            break;
        }
        left_base = left_base.min(v[i]);
    }
    let mut right_base = h;
    let mut i = peak;
    while i + 1 < v.len() {
        i += 1;
        if v[i] > h {
            break;
        }
        right_base = right_base.min(v[i]);
    }
    h - left_base.max(right_base)
}

fn find_peaks(v: &[f64]) -> Vec<usize> {
    let max = v.iter().copied().fold(0.0, f64::max);
    let floor = PEAK_FLOOR * max;
    let prominence = PROMINENCE_FLOOR * max;
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] > floor)
        .filter(|&i| peak_prominence(v, i) >= prominence)
        .collect()
}

/// Mean adjacent-peak contrast (I_max - I_min) / (I_max + I_min) of the
/// band-averaged screen line; 0 when fewer than two fringe peaks survive
/// the height and prominence filters.
fn fringe_visibility(intensity: &[f64]) -> f64 {
    let peaks = find_peaks(intensity);
    if peaks.len() < 2 {
        return 0.0;
    }
    let mut contrasts = Vec::with_capacity(peaks.len() - 1);
    for pair in peaks.windows(2) {
        let crest = 0.5 * (intensity[pair[0]] + intensity[pair[1]]);
        let trough = intensity[pair[0]..=pair[1]]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        contrasts.push((crest - trough) / (crest + trough));
    }
    contrasts.iter().sum::<f64>() / contrasts.len() as f64
}

/// Half the distance between the first-order peaks flanking the central one.
fn fringe_spacing(xs: &[f64], intensity: &[f64]) -> Option<f64> {
    let peaks = find_peaks(intensity);
    if peaks.len() < 3 {
        return None;
    }
    let central_rank = peaks
        .iter()
        .enumerate()
        .min_by(|(_, &i), (_, &j)| xs[i].abs().partial_cmp(&xs[j].abs()).unwrap())?
        .0;
    if central_rank == 0 || central_rank + 1 == peaks.len() {
        return None;
    }
    Some(0.5 * (xs[peaks[central_rank + 1]] - xs[peaks[central_rank - 1]]))
}

fn density_rows(grid: &GridSpec, values: &[f64]) -> Vec<Vec<Cell>> {
    (0..grid.len())
        .map(|cell| {
            let c = grid.center_of(cell);
            vec![Cell::from(c[0]), Cell::from(c[1]), Cell::from(values[cell])]
        })
        .collect()
}

/// Row and column addressing of the row-major planar grid.
fn row_of(grid: &GridSpec, y: f64) -> Result<usize> {
    let point = DVector::from_vec(vec![
        grid.center_of(0)[0],
        y,
    ]);
    let cell = grid
        .cell_of(&point)
        .ok_or_else(|| Error::Setup(format!("screen line at y = {y} lies outside the density grid")))?;
    Ok(cell % grid.shape[1])
}

pub fn run(cfg: &RunConfig, artifacts: &mut ArtifactSet) -> Result<DoubleSlitSummary> {
    let block = cfg.double_slit.clone().unwrap_or_default();
    let grid = cfg.grid()?;
    check_geometry(&grid, &block)?;
    let mode = SlitMode::parse(&block.slits)?;
    let seed = cfg.seed()?;
    let tt = cfg.flow()?.semi_period;
    let (slit_a, slit_b) = slit_centers(&block);
    let (_, drift_velocity) = transport_cycle(cfg, &block, cfg.steps_per_cycle()?)?;

    let psi_a = if mode != SlitMode::BOnly {
        Some(single_slit_wavefunction(cfg, &block, &grid, &slit_a, seed)?)
    } else {
        None
    };
    let psi_b = if mode != SlitMode::AOnly {
        Some(single_slit_wavefunction(cfg, &block, &grid, &slit_b, seed.wrapping_add(1))?)
    } else {
        None
    };
    let (superposed, norm_sq_superposed) = superpose(psi_a.as_ref(), psi_b.as_ref(), &grid)?;

    // Two-time alternation run: open slits alternate molecule by molecule.
    let centers: Vec<[f64; 2]> = match mode {
        SlitMode::Both => vec![slit_a, slit_b],
        SlitMode::AOnly => vec![slit_a],
        SlitMode::BOnly => vec![slit_b],
    };
    let n = cfg.geometry()?.n_molecules;
    let (cycle_tt, _) = transport_cycle(cfg, &block, block.marginal_every)?;
    let mut alternation = slit_cloud(n, &centers, block.slit_width, tt, seed.wrapping_add(2))?;
    let record = run_cycle(&mut alternation, &cycle_tt, 0)?;
    let marginal = marginal_density(&record, &grid)?;
    let end_slice = density_field(&[record], 2.0 * tt, &grid)?;

    // Screen-line extraction.
    let screen_row = row_of(&grid, block.screen_distance)?;
    let ny = grid.shape[1];
    let nx = grid.shape[0];
    let screen_y = grid.center_of(screen_row)[1];
    let mut xs = Vec::with_capacity(nx);
    let mut int_a = Vec::with_capacity(nx);
    let mut int_b = Vec::with_capacity(nx);
    let mut int_sup = Vec::with_capacity(nx);
    let mut int_tt = Vec::with_capacity(nx);
    let end_mass = end_slice.total_mass();
    let band_lo = screen_row.saturating_sub(SCREEN_HALF_BAND);
    let band_hi = (screen_row + SCREEN_HALF_BAND).min(ny - 1);
    let band = (band_hi - band_lo + 1) as f64;
    for ix in 0..nx {
        xs.push(grid.center_of(ix * ny + screen_row)[0]);
        let mut a = 0.0;
        let mut b = 0.0;
        let mut sup = 0.0;
        let mut tt_slice = 0.0;
        for row in band_lo..=band_hi {
            let cell = ix * ny + row;
            a += psi_a.as_ref().map_or(0.0, |w| w.amplitudes()[cell].norm_sqr());
            b += psi_b.as_ref().map_or(0.0, |w| w.amplitudes()[cell].norm_sqr());
            sup += superposed[cell];
            tt_slice += end_slice.values()[cell] / end_mass;
        }
        int_a.push(a / band);
        int_b.push(b / band);
        int_sup.push(sup / band);
        int_tt.push(tt_slice / band);
    }

    let visibility = fringe_visibility(&int_sup);
    let lambda_eff = std::f64::consts::TAU / block.k_eff;
    let fringe_spacing_analytic = lambda_eff * block.screen_distance / block.separation;
    let fringe_spacing_measured = if mode == SlitMode::Both {
        fringe_spacing(&xs, &int_sup)
    } else {
        None
    };
    let fringe_rel_error = fringe_spacing_measured
        .map(|m| (m - fringe_spacing_analytic).abs() / fringe_spacing_analytic);

    let midline_asymmetry = match (&psi_a, &psi_b) {
        (Some(a), Some(b)) => {
            let mid_col = grid
                .cell_of(&DVector::from_vec(vec![0.0, screen_y]))
                .map(|cell| cell / ny)
                .ok_or_else(|| Error::Setup("midline column lies outside the density grid".into()))?;
            let sum = |w: &EmergentWaveFunction| -> f64 {
                (0..ny).map(|iy| w.amplitudes()[mid_col * ny + iy].norm_sqr()).sum()
            };
            let (sa, sb) = (sum(a), sum(b));
            Some((sa - sb).abs() / (0.5 * (sa + sb)))
        }
        _ => None,
    };

    let overlap = match (&psi_a, &psi_b) {
        (Some(a), Some(b)) => Some(inner_product(a, b)?),
        _ => None,
    };

    if let Some(a) = &psi_a {
        artifacts.write_table("density_a", &["x", "y", "density"], &density_rows(&grid, &a.density()))?;
    }
    if let Some(b) = &psi_b {
        artifacts.write_table("density_b", &["x", "y", "density"], &density_rows(&grid, &b.density()))?;
    }
    artifacts.write_table(
        "density_superposed",
        &["x", "y", "density"],
        &density_rows(&grid, &superposed),
    )?;
    let marginal_mass = marginal.total_mass();
    let marginal_normalized: Vec<f64> =
        marginal.values().iter().map(|v| v / marginal_mass).collect();
    artifacts.write_table(
        "density_two_time_marginal",
        &["x", "y", "density"],
        &density_rows(&grid, &marginal_normalized),
    )?;
    let screen_rows: Vec<Vec<Cell>> = (0..nx)
        .map(|ix| {
            vec![
                Cell::from(xs[ix]),
                Cell::from(int_a[ix]),
                Cell::from(int_b[ix]),
                Cell::from(int_sup[ix]),
                Cell::from(int_tt[ix]),
            ]
        })
        .collect();
    artifacts.write_table(
        "screen",
        &["x", "intensity_a", "intensity_b", "intensity_superposed", "intensity_two_time"],
        &screen_rows,
    )?;

    let summary = DoubleSlitSummary {
        slits: block.slits.clone(),
        phase_model: block.phase.clone(),
        n_molecules: n,
        separation: block.separation,
        slit_width: block.slit_width,
        screen_distance: block.screen_distance,
        k_eff: block.k_eff,
        drift_velocity,
        lambda_eff,
        fringe_spacing_analytic,
        fringe_spacing_measured,
        fringe_rel_error,
        visibility,
        screen_row_y: screen_y,
        midline_asymmetry,
        overlap_re: overlap.map(|c| c.re),
        overlap_im: overlap.map(|c| c.im),
        l1_gap_marginal: l1_gap(&superposed, &marginal),
        l1_gap_end: l1_gap(&superposed, &end_slice),
        norm_sq_superposed,
    };
    artifacts.write_report("double_slit_report.json", &summary)?;
    Ok(summary)
}
