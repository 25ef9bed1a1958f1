//! Splitting Hamiltonians into a 1-Lipschitz core and a matter remainder:
//! empirical Lipschitz certification on compact boxes (coordinate-sum
//! distance), the radial attenuation decomposition, and the Newtonian
//! Lipschitz coefficient.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::rng::chunked;

/// Sum of coordinate-wise absolute differences (the distance every
/// certification in this module uses).
pub fn l1_distance(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum()
}

/// Axis-aligned compact box; projection onto it is coordinate clamping,
/// which is nonexpansive for the coordinate-sum distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Shape(format!(
                "box bounds of lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::Domain("box needs lower < upper in every coordinate".into()));
        }
        Ok(Self { lower, upper })
    }

    /// Box centered at the origin with the given half-widths.
    pub fn centered(half_widths: &[f64]) -> Result<Self> {
        let lower = half_widths.iter().map(|h| -h).collect();
        let upper = half_widths.to_vec();
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }

    /// Coordinate-wise clamp onto the box.
    pub fn clamp(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim(), |k, _| x[k].clamp(self.lower[k], self.upper[k]))
    }

    /// Coordinate-sum distance to the box (zero inside).
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        let p = self.clamp(x);
        l1_distance(x, &p)
    }

    /// Box scaled about its center, e.g. factor 2 for the margin box 2K.
    pub fn scale(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::Domain(format!("box scale factor must be positive, got {factor}")));
        }
        let lower = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u) - 0.5 * factor * (u - l))
            .collect();
        let upper = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u) + 0.5 * factor * (u - l))
            .collect();
        Self::new(lower, upper)
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        DVector::from_fn(self.dim(), |k, _| rng.random_range(self.lower[k]..self.upper[k]))
    }
}

/// Radial attenuation R(s): positive, nonincreasing, R(0) = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum RadialProfile {
    /// R(s) = 1 / (1 + s / s0).
    Rational { s0: f64 },
    /// R(s) = exp(-s / s0).
    Exponential { s0: f64 },
    /// No attenuation.
    Unit,
    /// Piecewise-linear table of (s, R) knots starting at (0, 1); constant
    /// past the last knot.
    Table { knots: Vec<(f64, f64)> },
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Rational { s0 } | RadialProfile::Exponential { s0 } => {
                if !(*s0 > 0.0) {
                    return Err(Error::Domain(format!(
                        "attenuation scale must be positive, got {s0}"
                    )));
                }
            }
            RadialProfile::Unit => {}
            RadialProfile::Table { knots } => {
                if knots.is_empty() || knots[0] != (0.0, 1.0) {
                    return Err(Error::Domain(
                        "attenuation table must start at the knot (0, 1)".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::Domain(
                            "attenuation table abscissae must increase".into(),
                        ));
                    }
                    if w[1].1 > w[0].1 {
                        return Err(Error::Domain(format!(
                            "attenuation must be nonincreasing, grows at s = {}",
                            w[1].0
                        )));
                    }
                }
                if knots.iter().any(|&(_, r)| !(r > 0.0)) {
                    return Err(Error::Domain("attenuation must stay positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match self {
            RadialProfile::Rational { s0 } => 1.0 / (1.0 + s / s0),
            RadialProfile::Exponential { s0 } => (-s / s0).exp(),
            RadialProfile::Unit => 1.0,
            RadialProfile::Table { knots } => {
                if s <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    if s <= w[1].0 {
                        let f = (s - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + f * (w[1].1 - w[0].1);
                    }
                }
                knots.last().unwrap().1
            }
        }
    }
}

/// Empirical Lipschitz certification of a Hamiltonian on a compact box.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LipschitzCertificate {
    /// Largest sampled difference quotient of H itself.
    pub raw_estimate: f64,
    /// Rescaling constant M = max(1/2, sup |H|) under which H is certified.
    pub normalization: f64,
    /// raw_estimate / normalization; certification compares this to 1.
    pub normalized_estimate: f64,
    pub pairs_used: usize,
    pub skipped_coincident: usize,
    pub pass: bool,
}

struct PairSample {
    ratio: f64,
    habs: f64,
    finite: bool,
    coincident: bool,
}

/// Sample difference quotients of `h` over uniform point pairs in `k`.
///
/// The certificate passes when the estimate of the rescaled Hamiltonian
/// H / max(1/2, sup |H|) stays at or below 1 for the coordinate-sum distance.
pub fn certify_lipschitz_on_compact<H>(
    h: H,
    k: &BoxDomain,
    pairs: usize,
    seed: u64,
) -> Result<LipschitzCertificate>
where
    H: Fn(&DVector<f64>) -> f64 + Sync,
{
    if pairs < 10_000 {
        return Err(Error::Sampling(format!(
            "certification needs at least 10000 pairs, got {pairs}"
        )));
    }
    let samples: Vec<PairSample> = chunked(seed, pairs, |rng, n| {
        (0..n)
            .map(|_| {
                let a = k.sample(rng);
                let b = k.sample(rng);
                let fa = h(&a);
                let fb = h(&b);
                let d = l1_distance(&a, &b);
                PairSample {
                    ratio: if d > 0.0 { (fa - fb).abs() / d } else { 0.0 },
                    habs: fa.abs().max(fb.abs()),
                    finite: fa.is_finite() && fb.is_finite(),
                    coincident: d == 0.0,
                }
            })
            .collect()
    });
    if samples.iter().any(|s| !s.finite) {
        return Err(Error::Domain(
            "Hamiltonian evaluated to a non-finite value inside the certification box".into(),
        ));
    }
    let mut raw = 0.0f64;
    let mut sup = 0.0f64;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for s in &samples {
        sup = sup.max(s.habs);
        if s.coincident {
            skipped += 1;
        } else {
            raw = raw.max(s.ratio);
            used += 1;
        }
    }
    let normalization = sup.max(0.5);
    let normalized = raw / normalization;
    Ok(LipschitzCertificate {
        raw_estimate: raw,
        normalization,
        normalized_estimate: normalized,
        pairs_used: used,
        skipped_coincident: skipped,
        pass: normalized <= 1.0,
    })
}

/// Evaluation interface shared by genuine decompositions and test fixtures.
pub trait DecompositionParts {
    fn lipschitz_part(&self, x: &DVector<f64>) -> f64;
    fn matter_part(&self, x: &DVector<f64>) -> f64;
}

/// Radial split of a Hamiltonian around a compact box K:
/// the core R(dist(x, K)) * H(proj_K(x)) plus the remainder.
pub struct Decomposition<F> {
    h: F,
    pub k: BoxDomain,
    pub r_profile: RadialProfile,
    /// Raw empirical Lipschitz constant of the core on the margin box 2K.
    pub lipschitz_constant_estimate: f64,
}

impl<F> DecompositionParts for Decomposition<F>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    fn lipschitz_part(&self, x: &DVector<f64>) -> f64 {
        let proj = self.k.clamp(x);
        self.r_profile.eval(l1_distance(x, &proj)) * (self.h)(&proj)
    }

    fn matter_part(&self, x: &DVector<f64>) -> f64 {
        (self.h)(x) - self.lipschitz_part(x)
    }
}

impl<F> Decomposition<F>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    pub fn source(&self, x: &DVector<f64>) -> f64 {
        (self.h)(x)
    }
}

/// Split `h` into the radially attenuated core and the matter remainder and
/// certify the core on the margin box 2K empirically.
pub fn radial_decompose<F>(
    h: F,
    k: BoxDomain,
    r_profile: RadialProfile,
    pairs: usize,
    seed: u64,
) -> Result<Decomposition<F>>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    r_profile.validate()?;
    let margin = k.scale(2.0)?;
    let core = |x: &DVector<f64>| {
        let proj = k.clamp(x);
        r_profile.eval(l1_distance(x, &proj)) * h(&proj)
    };
    let cert = certify_lipschitz_on_compact(core, &margin, pairs, seed)?;
    let estimate = cert.raw_estimate;
    Ok(Decomposition { h, k, r_profile, lipschitz_constant_estimate: estimate })
}

/// Largest reconstruction defect |H - (core + matter)| over the probes.
pub fn decomposition_residual<H, D>(h: H, dec: &D, probes: &[DVector<f64>]) -> Result<f64>
where
    H: Fn(&DVector<f64>) -> f64,
    D: DecompositionParts,
{
    if probes.is_empty() {
        return Err(Error::EmptyInput("residual needs probes".into()));
    }
    Ok(probes
        .iter()
        .map(|x| (h(x) - (dec.lipschitz_part(x) + dec.matter_part(x))).abs())
        .fold(0.0, f64::max))
}

/// Sweep attenuation scales and keep the weakest (largest s0) whose core
/// still certifies at or below 1 on the margin box 2K.
pub fn select_attenuation_scale<F>(
    h: F,
    k: &BoxDomain,
    candidates: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<(f64, Vec<(f64, f64)>)>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    if candidates.is_empty() {
        return Err(Error::EmptyInput("attenuation sweep needs candidate scales".into()));
    }
    let margin = k.scale(2.0)?;
    let mut sweep = Vec::with_capacity(candidates.len());
    let mut chosen: Option<f64> = None;
    let mut ordered = candidates.to_vec();
    ordered.sort_by(f64::total_cmp);
    ordered.reverse();
    for &s0 in &ordered {
        let profile = RadialProfile::Rational { s0 };
        profile.validate()?;
        let core = |x: &DVector<f64>| {
            let proj = k.clamp(x);
            profile.eval(l1_distance(x, &proj)) * h(&proj)
        };
        let cert = certify_lipschitz_on_compact(core, &margin, pairs, seed)?;
        sweep.push((s0, cert.raw_estimate));
        if chosen.is_none() && cert.raw_estimate <= 1.0 {
            chosen = Some(s0);
        }
    }
    match chosen {
        Some(s0) => Ok((s0, sweep)),
        None => Err(Error::Domain(
            "no candidate attenuation scale certifies at 1 on the margin box".into(),
        )),
    }
}

/// Newtonian Lipschitz coefficient.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NewtonAlpha {
    /// Compact form (1 + lambda) / lambda^3 * (D / D_planck) * (E / E_planck)
    /// with D = m / r^3 and E = m c^2.
    pub alpha: f64,
    /// Pre-simplification form l_p G^2 m M (r1 + r2) / (c^4 r1^2 r2^2)
    /// with r1 = r and r2 = lambda * r.
    pub general_form: f64,
    pub density_ratio: f64,
    pub energy_ratio: f64,
}

pub fn newton_alpha(
    m: f64,
    m_big: f64,
    r: f64,
    lambda: f64,
    constants: &PhysicalConstants,
) -> Result<NewtonAlpha> {
    for (name, v) in [("m", m), ("M", m_big), ("r", r), ("lambda", lambda)] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    let lp = constants.planck_length();
    let mp = constants.planck_mass();
    // same arithmetic shape for the probe and the Planck reference, so the
    // Planck point lands on exactly 1 in each ratio
    let density = m / (r * r * r);
    let density_p = mp / (lp * lp * lp);
    let energy = m * constants.c * constants.c;
    let energy_p = mp * constants.c * constants.c;
    let density_ratio = density / density_p;
    let energy_ratio = energy / energy_p;
    let alpha = (1.0 + lambda) / (lambda * lambda * lambda) * density_ratio * energy_ratio;

    let r1 = r;
    let r2 = lambda * r;
    let c4 = constants.c.powi(4);
    let general_form = lp * constants.g_newton * constants.g_newton * m * m_big * (r1 + r2)
        / (c4 * r1 * r1 * r2 * r2);

    Ok(NewtonAlpha { alpha, general_form, density_ratio, energy_ratio })
}
