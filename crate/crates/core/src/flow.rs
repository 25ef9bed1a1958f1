//! Internal-time flow: the interpolation `F_t = sqrt(kappa(t) |h| +
//! (1 - kappa(t)) |F|^2)` between a Randers structure and its averaged
//! metric, time inversion, and the classical Hamiltonian
//! `H_t = 1/2 F_t(u, p) - 1/2 F_t(T_t u, T_t p)` that measures how far the
//! deformed structure is from its time-inversion-symmetric metastable limit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{hr_value, PhasePoint, RandersStructure};

/// Interpolation profiles for the internal-time schedule. All profiles are
/// nondecreasing with kappa(0) = 0 and kappa(T) = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaProfile {
    Smoothstep,
    Linear,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KappaSchedule {
    pub semi_period: f64,
    pub profile: KappaProfile,
}

impl KappaSchedule {
    pub fn new(semi_period: f64, profile: KappaProfile) -> Result<Self> {
        if !(semi_period > 0.0) {
            return Err(Error::Domain(format!("semi-period must be positive, got {semi_period}")));
        }
        Ok(Self { semi_period, profile })
    }

    pub fn smoothstep(semi_period: f64) -> Result<Self> {
        Self::new(semi_period, KappaProfile::Smoothstep)
    }

    /// kappa(t) on [0, T]. Endpoints are handled exactly; a relative slack
    /// of 1e-9 T absorbs float drift from step accumulation.
    pub fn kappa(&self, t: f64) -> Result<f64> {
        let tt = self.semi_period;
        let slack = 1e-9 * tt;
        if t < -slack || t > tt + slack {
            return Err(Error::ScheduleDomain { t, semi_period: tt });
        }
        let s = (t / tt).clamp(0.0, 1.0);
        if s == 0.0 {
            return Ok(0.0);
        }
        if s == 1.0 {
            return Ok(1.0);
        }
        Ok(match self.profile {
            KappaProfile::Smoothstep => s * s * (3.0 - 2.0 * s),
            KappaProfile::Linear => s,
            KappaProfile::Cosine => 0.5 * (1.0 - (std::f64::consts::PI * s).cos()),
        })
    }
}

/// Core blend: `sqrt(kappa |h| + (1 - kappa) |g|)` for scalar evaluations
/// g = F^2(u,p) and h = h^{ij} p_i p_j.
pub fn ut_deform_value(g_val: f64, h_val: f64, kappa: f64) -> f64 {
    (kappa * h_val.abs() + (1.0 - kappa) * g_val.abs()).sqrt()
}

fn h_qform(h: &DMatrix<f64>, p: &DVector<f64>) -> f64 {
    (p.transpose() * h * p)[(0, 0)]
}

/// Deformed structure value `F_t(u, p)` at internal time t.
pub fn ut_deform(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    sched: &KappaSchedule,
    t: f64,
    pt: &PhasePoint,
) -> Result<f64> {
    let kappa = sched.kappa(t)?;
    let f = hr_value(s, pt)?;
    Ok(ut_deform_value(f * f, h_qform(h, &pt.p), kappa))
}

/// Value of a convex-hull member: the structure whose fundamental tensor is
/// `t1 g + (1 - t1) h`, i.e. `sqrt(t1 F^2 + (1 - t1) h(p,p))`.
pub fn hull_member_value(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    t1: f64,
    pt: &PhasePoint,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&t1) {
        return Err(Error::Domain(format!("hull coefficient must lie in [0,1], got {t1}")));
    }
    let f = hr_value(s, pt)?;
    Ok((t1 * f * f + (1.0 - t1) * h_qform(h, &pt.p).abs()).max(0.0).sqrt())
}

/// Deform a convex-hull member: its squared value replaces F^2 in the blend.
pub fn ut_deform_hull(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    t1: f64,
    sched: &KappaSchedule,
    t: f64,
    pt: &PhasePoint,
) -> Result<f64> {
    let kappa = sched.kappa(t)?;
    let member = hull_member_value(s, h, t1, pt)?;
    Ok(ut_deform_value(member * member, h_qform(h, &pt.p), kappa))
}

/// Time inversion on a phase point: per molecule,
/// `(x, y, p_x, p_y) -> (x, -y, -p_x, p_y)`. An involution.
pub fn t_inversion(pt: &PhasePoint, d: usize, n_molecules: usize) -> Result<PhasePoint> {
    let dim = 2 * d * n_molecules;
    if pt.dim() != dim {
        return Err(Error::Shape(format!(
            "phase point has dimension {}, layout expects {dim}",
            pt.dim()
        )));
    }
    let mut u = pt.u.clone();
    let mut p = pt.p.clone();
    for k in 0..n_molecules {
        let base = 2 * d * k;
        for i in 0..d {
            u[base + d + i] = -u[base + d + i]; // y sector
            p[base + i] = -p[base + i]; // p_x sector
        }
    }
    Ok(PhasePoint { u, p })
}

/// Reflection matrix conjugation on momentum-space quadratic forms: zeroes
/// the mixed (p_x, p_y) blocks by averaging `h` with its time-inversion
/// image. The exact averaged metric of a drift field with vanishing
/// acceleration sector is reflection-symmetric; this projects Monte-Carlo
/// asymmetry out of a sampled estimate.
pub fn symmetrize_time_inversion(h: &DMatrix<f64>, d: usize, n_molecules: usize) -> Result<DMatrix<f64>> {
    let dim = 2 * d * n_molecules;
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::Shape(format!(
            "metric is {}x{}, layout expects {dim}x{dim}",
            h.nrows(),
            h.ncols()
        )));
    }
    let sign = |idx: usize| -> f64 {
        let local = idx % (2 * d);
        if local < d {
            -1.0
        } else {
            1.0
        }
    };
    let mut out = h.clone();
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = 0.5 * (h[(i, j)] + sign(i) * sign(j) * h[(i, j)]);
        }
    }
    Ok(out)
}

/// Classical Hamiltonian of the deformed structure:
/// `H_t(pt) = 1/2 F_t(pt) - 1/2 F_t(T_t pt)`.
///
/// For a constant drift confined to the position sector (the block conjugate
/// to p_x) this equals `(1 - kappa(t)) beta . p` up to O(|beta|^2) blend
/// corrections, exactly at t = 0, and vanishes identically at t = T when `h`
/// is reflection-symmetric.
pub fn ht_classical(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    sched: &KappaSchedule,
    t: f64,
    pt: &PhasePoint,
) -> Result<f64> {
    let reflected = t_inversion(pt, s.base_dim(), s.n_molecules())?;
    let a = ut_deform(s, h, sched, t, pt)?;
    let b = ut_deform(s, h, sched, t, &reflected)?;
    Ok(0.5 * a - 0.5 * b)
}

/// Max |H_t| over a probe set.
pub fn metastable_residual(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    sched: &KappaSchedule,
    t: f64,
    probes: &[PhasePoint],
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("metastable_residual needs probes".into()));
    }
    let mut max = 0.0f64;
    for pt in probes {
        max = max.max(ht_classical(s, h, sched, t, pt)?.abs());
    }
    Ok(max)
}

/// State of the flow at one internal time.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FlowSnapshot {
    pub t: f64,
    pub kappa: f64,
    pub residual: f64,
}

pub fn flow_snapshot(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    sched: &KappaSchedule,
    t: f64,
    probes: &[PhasePoint],
) -> Result<FlowSnapshot> {
    Ok(FlowSnapshot {
        t,
        kappa: sched.kappa(t)?,
        residual: metastable_residual(s, h, sched, t, probes)?,
    })
}

/// Interpolation weight evaluator for the commutation check: either the
/// shared schedule (independent of the phase point) or an adversarial
/// point-dependent weight.
pub enum KappaEval<'a> {
    Schedule(&'a KappaSchedule),
    PointDependent(&'a dyn Fn(&PhasePoint, f64) -> f64),
}

impl KappaEval<'_> {
    fn eval(&self, pt: &PhasePoint, t: f64) -> Result<f64> {
        match self {
            KappaEval::Schedule(s) => s.kappa(t),
            KappaEval::PointDependent(f) => Ok(f(pt, t)),
        }
    }
}

/// Checks that deforming then reflecting agrees with reflecting then
/// deforming. Route A evaluates the deformed structure at the reflected
/// point; route B deforms the reflected structure (whose squared value and
/// averaged form at `pt` are the originals at the reflected point) with the
/// weight read off at `pt`. The two coincide exactly when the weight cannot
/// see the phase point.
pub fn commutation_check(
    s: &RandersStructure,
    h: &DMatrix<f64>,
    kappa: &KappaEval,
    t: f64,
    probes: &[PhasePoint],
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("commutation_check needs probes".into()));
    }
    let mut max = 0.0f64;
    for pt in probes {
        let reflected = t_inversion(pt, s.base_dim(), s.n_molecules())?;
        let f_refl = hr_value(s, &reflected)?;
        let h_refl = h_qform(h, &reflected.p);
        let ka = kappa.eval(&reflected, t)?;
        let kb = kappa.eval(pt, t)?;
        let route_a = ut_deform_value(f_refl * f_refl, h_refl, ka);
        let route_b = ut_deform_value(f_refl * f_refl, h_refl, kb);
        max = max.max((route_a - route_b).abs());
    }
    Ok(max)
}
