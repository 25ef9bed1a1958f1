//! Lorentzian metrics, their Sasaki-type lifts, and observer-adapted
//! Riemannian metrics.
//!
//! The base metric is a constant symmetric matrix of signature
//! `(+, -, ..., -)`. Its lift to the tangent-of-tangent space is the block
//! sum `g (+) g`; phase-space momenta pair with the dual (inverse) blocks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Constant Lorentzian metric on the d-dimensional base manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMetric {
    matrix: DMatrix<f64>,
    dual: DMatrix<f64>,
}

impl LorentzMetric {
    /// diag(1, -1, ..., -1)
    pub fn minkowski(d: usize) -> Self {
        let mut m = DMatrix::zeros(d, d);
        m[(0, 0)] = 1.0;
        for i in 1..d {
            m[(i, i)] = -1.0;
        }
        Self { dual: m.clone(), matrix: m }
    }

    /// Build from an explicit symmetric matrix; the signature (one positive
    /// eigenvalue, d-1 negative) is verified.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d < 2 || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "metric must be square with d >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let skew = (&matrix - matrix.transpose()).abs().max();
        if skew > 1e-12 * (1.0 + matrix.abs().max()) {
            return Err(Error::Signature(format!("matrix not symmetric (defect {skew:.3e})")));
        }
        let eigen = matrix.clone().symmetric_eigen();
        let scale = eigen.eigenvalues.abs().max();
        let mut positive = 0usize;
        let mut negative = 0usize;
        for &l in eigen.eigenvalues.iter() {
            if l.abs() < 1e-12 * scale.max(1.0) {
                return Err(Error::Singular(format!("near-zero eigenvalue {l:.3e}")));
            }
            if l > 0.0 {
                positive += 1;
            } else {
                negative += 1;
            }
        }
        if positive != 1 || negative != d - 1 {
            return Err(Error::Signature(format!(
                "expected signature (1, {}), found ({positive}, {negative})",
                d - 1
            )));
        }
        let dual = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("metric not invertible".into()))?;
        Ok(Self { matrix, dual })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Inverse components, pairing with momenta.
    pub fn dual(&self) -> &DMatrix<f64> {
        &self.dual
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a.transpose() * &self.matrix * b)[(0, 0)]
    }
}

/// Dual metric block on one molecule's momentum fiber: block sum of two
/// copies of the inverse base metric, size 2d x 2d.
pub fn sasaki_block_metric(g4: &LorentzMetric) -> DMatrix<f64> {
    let d = g4.dim();
    let mut block = DMatrix::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(g4.dual());
    block.view_mut((d, d), (d, d)).copy_from(g4.dual());
    block
}

/// A timelike observer direction W for the base metric.
#[derive(Debug, Clone)]
pub struct ObserverFrame {
    pub w: DVector<f64>,
}

/// Positive-definite metric adapted to an observer.
///
/// The raw construction reflects the metric through the observer:
/// `bar(u,v) = eta(u,v) - 2 eta(u,W) eta(v,W) / eta(W,W)`. For signature
/// `(+,-,...,-)` that form is negative definite, so the stored matrix is the
/// overall sign flip; `sign_flipped` records the convention.
#[derive(Debug, Clone)]
pub struct ObserverMetric {
    matrix: DMatrix<f64>,
    sign_flipped: bool,
}

impl ObserverMetric {
    /// The stored positive-definite matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn sign_flipped(&self) -> bool {
        self.sign_flipped
    }

    /// The reflected form exactly as constructed, before any sign flip.
    pub fn raw_matrix(&self) -> DMatrix<f64> {
        if self.sign_flipped {
            -&self.matrix
        } else {
            self.matrix.clone()
        }
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        (v.transpose() * &self.matrix * v)[(0, 0)].max(0.0).sqrt()
    }

    /// Flat-space geodesic distance between events.
    pub fn distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.norm(&(x - y))
    }
}

/// Build the observer metric for frame W; W must be timelike.
pub fn observer_metric(g4: &LorentzMetric, frame: &ObserverFrame) -> Result<ObserverMetric> {
    if frame.w.len() != g4.dim() {
        return Err(Error::Shape(format!(
            "frame dimension {} does not match metric dimension {}",
            frame.w.len(),
            g4.dim()
        )));
    }
    let ww = g4.inner(&frame.w, &frame.w);
    if ww <= 0.0 {
        return Err(Error::Frame { norm: ww });
    }
    let gw = g4.matrix() * &frame.w;
    let raw = g4.matrix() - (&gw * gw.transpose()) * (2.0 / ww);
    // Definiteness check: for a valid timelike frame the reflected form is
    // negative definite, and the flipped matrix is the usable norm.
    let eigen = raw.clone().symmetric_eigen();
    let max_abs = eigen.eigenvalues.abs().max();
    if eigen.eigenvalues.iter().any(|&l| l > -1e-12 * max_abs.max(1.0)) {
        return Err(Error::Frame { norm: ww });
    }
    Ok(ObserverMetric { matrix: -raw, sign_flipped: true })
}

/// Distance from an event to a sampled world line: the infimum of observer
/// distances over the line's sample points.
pub fn distance_to_worldline(
    x: &DVector<f64>,
    line: &[DVector<f64>],
    metric: &ObserverMetric,
) -> Result<f64> {
    if line.is_empty() {
        return Err(Error::EmptyWorldline);
    }
    Ok(line
        .iter()
        .map(|pt| metric.distance(x, pt))
        .fold(f64::INFINITY, f64::min))
}
