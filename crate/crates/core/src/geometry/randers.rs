//! Randers-type structures on the phase space of N identical molecules.
//!
//! Each molecule carries configuration coordinates (x, y) in R^d x R^d and
//! conjugate momenta (p_x, p_y); the full phase point stacks molecules
//! block-wise, so `u` and `p` both have length 2 d N. The structure value is
//!
//! `F(u, p) = sqrt(eta^{ij} p_i p_j) + beta^i(u) p_i`
//!
//! with `eta` the block sum of identical Sasaki-lift dual blocks and `beta`
//! a drift vector field subject to the Randers bound `eta*(beta, beta) < 1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::lorentz::{sasaki_block_metric, LorentzMetric};

/// Relative finite-difference step for momentum Hessians. Chosen so that for
/// quadratic values the round-off floor (~eps/h^2) stays below 1e-9 while the
/// truncation term (~h^2) stays below 1e-5 on generic Randers data.
pub const HESSIAN_REL_STEP: f64 = 1e-3;

/// Point of the molecular phase space: `u` stacks per-molecule (x, y)
/// blocks, `p` the conjugate (p_x, p_y) blocks; both of length 2 d N.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub u: DVector<f64>,
    pub p: DVector<f64>,
}

impl PhasePoint {
    pub fn new(u: DVector<f64>, p: DVector<f64>) -> Result<Self> {
        if u.len() != p.len() {
            return Err(Error::Shape(format!(
                "u has length {}, p has length {}",
                u.len(),
                p.len()
            )));
        }
        Ok(Self { u, p })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { u: DVector::zeros(dim), p: DVector::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// Drift vector field over configuration space, length 2 d N.
///
/// All families provide exact Jacobians. The sinusoidal family acts
/// component-wise: `beta^i(u) = a_i sin(f_i u^i + phi_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BetaField {
    Constant { values: Vec<f64> },
    Linear {
        /// Row-major 2dN x 2dN coefficient matrix.
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        offset: Option<Vec<f64>>,
    },
    Sinusoidal {
        amplitude: Vec<f64>,
        frequency: Vec<f64>,
        #[serde(default)]
        phase: Option<Vec<f64>>,
    },
}

impl BetaField {
    pub fn zero(dim: usize) -> Self {
        BetaField::Constant { values: vec![0.0; dim] }
    }

    pub fn len(&self) -> usize {
        match self {
            BetaField::Constant { values } => values.len(),
            BetaField::Linear { matrix, .. } => matrix.len(),
            BetaField::Sinusoidal { amplitude, .. } => amplitude.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check = |len: usize, what: &str| {
            if len != dim {
                Err(Error::Shape(format!("beta {what} has length {len}, expected {dim}")))
            } else {
                Ok(())
            }
        };
        match self {
            BetaField::Constant { values } => check(values.len(), "constant vector"),
            BetaField::Linear { matrix, offset } => {
                check(matrix.len(), "matrix row count")?;
                for row in matrix {
                    check(row.len(), "matrix row")?;
                }
                if let Some(o) = offset {
                    check(o.len(), "offset")?;
                }
                Ok(())
            }
            BetaField::Sinusoidal { amplitude, frequency, phase } => {
                check(amplitude.len(), "amplitude")?;
                check(frequency.len(), "frequency")?;
                if let Some(ph) = phase {
                    check(ph.len(), "phase")?;
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        match self {
            BetaField::Constant { values } => DVector::from_column_slice(values),
            BetaField::Linear { matrix, offset } => {
                let dim = matrix.len();
                let mut out = DVector::zeros(dim);
                for (i, row) in matrix.iter().enumerate() {
                    let mut acc = 0.0;
                    for (j, a) in row.iter().enumerate() {
                        acc += a * u[j];
                    }
                    out[i] = acc + offset.as_ref().map_or(0.0, |o| o[i]);
                }
                out
            }
            BetaField::Sinusoidal { amplitude, frequency, phase } => {
                let dim = amplitude.len();
                DVector::from_fn(dim, |i, _| {
                    let ph = phase.as_ref().map_or(0.0, |p| p[i]);
                    amplitude[i] * (frequency[i] * u[i] + ph).sin()
                })
            }
        }
    }

    /// Exact Jacobian d beta^i / d u^j.
    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let dim = self.len();
        match self {
            BetaField::Constant { .. } => DMatrix::zeros(dim, dim),
            BetaField::Linear { matrix, .. } => {
                DMatrix::from_fn(dim, dim, |i, j| matrix[i][j])
            }
            BetaField::Sinusoidal { amplitude, frequency, phase } => {
                let mut out = DMatrix::zeros(dim, dim);
                for i in 0..dim {
                    let ph = phase.as_ref().map_or(0.0, |p| p[i]);
                    out[(i, i)] = amplitude[i] * frequency[i] * (frequency[i] * u[i] + ph).cos();
                }
                out
            }
        }
    }
}

/// Phase-space structure for N identical molecules over a shared base metric.
#[derive(Debug, Clone)]
pub struct RandersStructure {
    n_molecules: usize,
    d: usize,
    /// Dual Sasaki block (2d x 2d), identical for every molecule.
    block: DMatrix<f64>,
    /// Primal block (inverse of `block`), used for the drift bound.
    primal_block: DMatrix<f64>,
    beta: BetaField,
}

impl RandersStructure {
    pub fn new(g4: &LorentzMetric, n_molecules: usize, beta: BetaField) -> Result<Self> {
        if n_molecules == 0 {
            return Err(Error::Domain("need at least one molecule".into()));
        }
        let d = g4.dim();
        let dim = 2 * d * n_molecules;
        beta.validate(dim)?;
        let block = sasaki_block_metric(g4);
        let primal_block = block
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("Sasaki block not invertible".into()))?;
        Ok(Self { n_molecules, d, block, primal_block, beta })
    }

    pub fn n_molecules(&self) -> usize {
        self.n_molecules
    }

    pub fn base_dim(&self) -> usize {
        self.d
    }

    /// Length of u and p: 2 d N.
    pub fn phase_dim(&self) -> usize {
        2 * self.d * self.n_molecules
    }

    pub fn block(&self) -> &DMatrix<f64> {
        &self.block
    }

    pub fn beta(&self) -> &BetaField {
        &self.beta
    }

    pub fn set_beta(&mut self, beta: BetaField) -> Result<()> {
        beta.validate(self.phase_dim())?;
        self.beta = beta;
        Ok(())
    }

    /// eta^{ij} p_i p_j over the block-diagonal dual metric.
    pub fn eta_qform(&self, p: &DVector<f64>) -> f64 {
        let b = 2 * self.d;
        let mut total = 0.0;
        for k in 0..self.n_molecules {
            let seg = p.rows(k * b, b);
            total += (seg.transpose() * &self.block * seg)[(0, 0)];
        }
        total
    }

    /// eta*(v, v) over the block-diagonal primal metric (drift-bound form).
    pub fn eta_primal_qform(&self, v: &DVector<f64>) -> f64 {
        let b = 2 * self.d;
        let mut total = 0.0;
        for k in 0..self.n_molecules {
            let seg = v.rows(k * b, b);
            total += (seg.transpose() * &self.primal_block * seg)[(0, 0)];
        }
        total
    }

    /// Worst drift-bound value eta*(beta, beta) over the given configuration
    /// probes; the structure is admissible when this stays below 1.
    pub fn randers_bound(&self, probes: &[DVector<f64>]) -> Result<f64> {
        if probes.is_empty() {
            return Err(Error::EmptyInput("randers_bound needs probes".into()));
        }
        Ok(probes
            .iter()
            .map(|u| self.eta_primal_qform(&self.beta.eval(u)))
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Strict interior of the timelike cone: eta^{ij} p_i p_j > 0.
pub fn cone_contains(s: &RandersStructure, p: &DVector<f64>) -> bool {
    s.eta_qform(p) > 0.0
}

/// Structure value `F(u,p) = sqrt(eta(p,p)) + beta(u).p`; requires the
/// closed cone (`eta(p,p) >= 0`).
pub fn hr_value(s: &RandersStructure, pt: &PhasePoint) -> Result<f64> {
    let q = s.eta_qform(&pt.p);
    if q < 0.0 {
        return Err(Error::ConeDomain { qform: q });
    }
    Ok(q.sqrt() + s.beta.eval(&pt.u).dot(&pt.p))
}

/// Convenience: squared structure value.
pub fn hr_value_squared(s: &RandersStructure, pt: &PhasePoint) -> Result<f64> {
    hr_value(s, pt).map(|f| f * f)
}

/// Fundamental tensor `g^{ij}(u,p) = 1/2 d^2 F^2 / dp_i dp_j`, computed with
/// central finite differences in the momenta. The point must lie strictly
/// inside the cone and far enough from its boundary that every probe stays
/// in the closed cone.
pub fn fundamental_tensor(s: &RandersStructure, pt: &PhasePoint) -> Result<DMatrix<f64>> {
    let dim = s.phase_dim();
    if pt.dim() != dim {
        return Err(Error::Shape(format!(
            "phase point has dimension {}, structure expects {dim}",
            pt.dim()
        )));
    }
    let q0 = s.eta_qform(&pt.p);
    if q0 <= 0.0 {
        return Err(Error::ConeSingularity { qform: q0 });
    }
    let h = HESSIAN_REL_STEP * pt.p.norm().max(1.0);
    let beta_u = s.beta.eval(&pt.u);
    let f2 = |p: &DVector<f64>| -> Result<f64> {
        let q = s.eta_qform(p);
        if q < 0.0 {
            return Err(Error::ConeSingularity { qform: q });
        }
        let f = q.sqrt() + beta_u.dot(p);
        Ok(f * f)
    };

    let base = f2(&pt.p)?;
    let mut g = DMatrix::zeros(dim, dim);
    let mut probe = pt.p.clone();
    // Diagonal: (f(p+h e_i) - 2 f(p) + f(p-h e_i)) / h^2, halved.
    for i in 0..dim {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = f2(&probe)?;
        probe[i] = orig - h;
        let fm = f2(&probe)?;
        probe[i] = orig;
        g[(i, i)] = 0.5 * (fp - 2.0 * base + fm) / (h * h);
    }
    // Off-diagonal via the symmetric four-point stencil; one evaluation per
    // unordered pair keeps g bitwise symmetric.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let (oi, oj) = (probe[i], probe[j]);
            probe[i] = oi + h;
            probe[j] = oj + h;
            let fpp = f2(&probe)?;
            probe[j] = oj - h;
            let fpm = f2(&probe)?;
            probe[i] = oi - h;
            probe[j] = oj + h;
            let fmp = f2(&probe)?;
            probe[j] = oj - h;
            let fmm = f2(&probe)?;
            probe[i] = oi;
            probe[j] = oj;
            let v = 0.5 * (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}
