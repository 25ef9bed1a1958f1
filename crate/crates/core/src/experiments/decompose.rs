//! Decompose scenario: certify the drift Hamiltonian on a compact box,
//! split it into a 1-Lipschitz core plus a matter remainder, and sweep the
//! gravitational-strength coefficient across mass/radius probes.

use nalgebra::DVector;
use serde::Serialize;

use crate::constants::{PhysicalConstants, BOHR_RADIUS_SI, ELECTRON_MASS_SI};
use crate::error::Result;
use crate::geometry::BetaField;
use crate::lipschitz::{
    certify_lipschitz_on_compact, decomposition_residual, newton_alpha, radial_decompose,
    select_attenuation_scale, BoxDomain, DecompositionParts, LipschitzCertificate, RadialProfile,
};
use crate::rng::stream_rng;

use super::config::RunConfig;
use super::writers::{ArtifactSet, Cell};

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub raw_estimate: f64,
    pub normalization: f64,
    pub normalized_estimate: f64,
    pub pairs_used: usize,
    pub pass: bool,
}

impl From<&LipschitzCertificate> for CertificateSummary {
    fn from(cert: &LipschitzCertificate) -> Self {
        Self {
            raw_estimate: cert.raw_estimate,
            normalization: cert.normalization,
            normalized_estimate: cert.normalized_estimate,
            pairs_used: cert.pairs_used,
            pass: cert.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeSummary {
    pub phase_dim: usize,
    pub half_width: f64,
    /// Certificate of the raw Hamiltonian on K.
    pub hamiltonian: CertificateSummary,
    /// Largest candidate attenuation scale whose core stays 1-Lipschitz.
    pub chosen_scale: f64,
    /// Certificate of the extracted core on the doubled box.
    pub core_on_2k: CertificateSummary,
    pub reconstruction_residual: f64,
    pub matter_max_inside: f64,
    /// Interaction strength at the reference density and energy: exactly 2.
    pub alpha_reference: f64,
    pub alpha_electron: f64,
}

pub fn run(cfg: &RunConfig, artifacts: &mut ArtifactSet) -> Result<DecomposeSummary> {
    let params = cfg.decompose.clone().unwrap_or_default();
    let geo = cfg.geometry()?;
    let beta = cfg.beta_field()?;
    let seed = cfg.seed()?;
    let half = 2 * geo.d;
    let dim = 2 * half;

    // Drift Hamiltonian beta(u) . p over the flattened (u, p) box.
    let h = make_hamiltonian(&beta, half);
    let k = BoxDomain::centered(&vec![params.half_width; dim])?;
    let cert_h = certify_lipschitz_on_compact(h, &k, params.pairs, seed)?;

    let normalization = cert_h.normalization;
    let h_tilde = move |z: &DVector<f64>| h(z) / normalization;

    let (chosen_scale, sweep) =
        select_attenuation_scale(h_tilde, &k, &params.scales, params.pairs, seed.wrapping_add(1))?;
    let sweep_rows: Vec<Vec<Cell>> = sweep
        .iter()
        .map(|&(s0, raw)| vec![Cell::from(s0), Cell::from(raw), Cell::from(raw <= 1.0)])
        .collect();
    artifacts.write_table("scale_sweep", &["scale", "raw_estimate", "certified"], &sweep_rows)?;

    let dec = radial_decompose(
        h_tilde,
        k.clone(),
        RadialProfile::Rational { s0: chosen_scale },
        params.pairs,
        seed.wrapping_add(2),
    )?;
    let margin = k.scale(2.0)?;
    let cert_core = certify_lipschitz_on_compact(
        |x: &DVector<f64>| dec.lipschitz_part(x),
        &margin,
        params.pairs,
        seed.wrapping_add(3),
    )?;

    let mut rng = stream_rng(seed, 0x5eed);
    let probes_wide: Vec<DVector<f64>> =
        (0..params.probes).map(|_| margin.sample(&mut rng)).collect();
    let probes_inside: Vec<DVector<f64>> =
        (0..params.probes).map(|_| k.sample(&mut rng)).collect();
    let residual = decomposition_residual(h_tilde, &dec, &probes_wide)?;
    let matter_max_inside = probes_inside
        .iter()
        .map(|x| dec.matter_part(x).abs())
        .fold(0.0, f64::max);

    let constants = PhysicalConstants::si();
    let reference = newton_alpha(
        constants.planck_mass(),
        constants.planck_mass(),
        constants.planck_length(),
        params.lambda,
        &constants,
    )?;
    let electron = newton_alpha(
        ELECTRON_MASS_SI,
        ELECTRON_MASS_SI,
        BOHR_RADIUS_SI,
        params.lambda,
        &constants,
    )?;
    let mut alpha_rows = Vec::with_capacity(params.masses.len() * params.radii.len() + 2);
    for &m in &params.masses {
        for &r in &params.radii {
            let point = newton_alpha(m, m, r, params.lambda, &constants)?;
            alpha_rows.push(vec![
                Cell::from(m),
                Cell::from(r),
                Cell::from(point.alpha),
                Cell::from(point.general_form),
            ]);
        }
    }
    alpha_rows.push(vec![
        Cell::from(constants.planck_mass()),
        Cell::from(constants.planck_length()),
        Cell::from(reference.alpha),
        Cell::from(reference.general_form),
    ]);
    alpha_rows.push(vec![
        Cell::from(ELECTRON_MASS_SI),
        Cell::from(BOHR_RADIUS_SI),
        Cell::from(electron.alpha),
        Cell::from(electron.general_form),
    ]);
    artifacts.write_table(
        "alpha_sweep",
        &["mass_kg", "radius_m", "alpha", "general_form"],
        &alpha_rows,
    )?;

    let summary = DecomposeSummary {
        phase_dim: dim,
        half_width: params.half_width,
        hamiltonian: (&cert_h).into(),
        chosen_scale,
        core_on_2k: (&cert_core).into(),
        reconstruction_residual: residual,
        matter_max_inside,
        alpha_reference: reference.alpha,
        alpha_electron: electron.alpha,
    };
    artifacts.write_report("decompose_report.json", &summary)?;
    Ok(summary)
}

fn make_hamiltonian(beta: &BetaField, half: usize) -> impl Fn(&DVector<f64>) -> f64 + Sync + Copy + '_ {
    move |z: &DVector<f64>| {
        let u = z.rows(0, half).into_owned();
        let b = beta.eval(&u);
        (0..half).map(|k| b[k] * z[half + k]).sum()
    }
}
