//! Finite toy quantization: periodic grid operators with spectral momentum,
//! the symmetrized drift Hamiltonian, unitary Heisenberg steps, and the
//! check that operator evolution reproduces the classical drift.
//!
//! Exact canonical commutation is impossible in finite dimension; the
//! contract holds on smooth test vectors and tightens under grid refinement.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};

use crate::dynamics::{integrate, DEFAULT_DRIFT_FACTOR};
use crate::error::{Error, Result};
use crate::flow::KappaSchedule;
use crate::geometry::{BetaField, LorentzMetric, PhasePoint, RandersStructure};

/// Periodic position grid of K sites with diagonal position operator and
/// Fourier-realized momentum (Nyquist mode zeroed for exact Hermiticity).
#[derive(Debug, Clone)]
pub struct ToyHilbert {
    pub k: usize,
    pub spacing: f64,
    pub hbar: f64,
    pub x_op: DMatrix<Complex<f64>>,
    pub p_op: DMatrix<Complex<f64>>,
}

/// Largest deviation from Hermitian symmetry, max |m_ij - conj(m_ji)|.
pub fn hermiticity_defect(m: &DMatrix<Complex<f64>>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn commutator(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    a * b - b * a
}

/// <psi|A|psi> / <psi|psi>.
pub fn expectation(a: &DMatrix<Complex<f64>>, psi: &DVector<Complex<f64>>) -> Complex<f64> {
    let num = psi.dotc(&(a * psi));
    let den = psi.dotc(psi);
    num / den
}

pub fn build_operators(k: usize, spacing: f64, hbar: f64) -> Result<ToyHilbert> {
    if k < 8 || !k.is_power_of_two() {
        return Err(Error::Capability(format!(
            "grid size must be a power of two >= 8, got {k}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(Error::Domain(format!("grid spacing must be positive, got {spacing}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    let half = (k / 2) as i64;
    let x_op = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex::new((i as i64 - half) as f64 * spacing, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });

    // wavenumbers of the discrete Fourier basis, Nyquist zeroed
    let kf = k as f64;
    let wavenumbers: Vec<f64> = (0..k)
        .map(|m| {
            let m = m as i64;
            let folded = if m < half { m } else if m == half { 0 } else { m - k as i64 };
            std::f64::consts::TAU * folded as f64 / (kf * spacing)
        })
        .collect();
    // circulant kernel c[r] = (hbar / K) sum_m k_m exp(2 pi i m r / K);
    // p[j, l] = c[(j - l) mod K] is Hermitian exactly because k_m is real
    // and odd-symmetric
    let kernel: Vec<Complex<f64>> = (0..k)
        .map(|r| {
            let mut acc = Complex::new(0.0, 0.0);
            for (m, &wn) in wavenumbers.iter().enumerate() {
                let angle = std::f64::consts::TAU * (m * r) as f64 / kf;
                acc += Complex::from_polar(1.0, angle) * wn;
            }
            acc * (hbar / kf)
        })
        .collect();
    let p_op = DMatrix::from_fn(k, k, |i, j| kernel[(i + k - j) % k]);

    Ok(ToyHilbert { k, spacing, hbar, x_op, p_op })
}

impl ToyHilbert {
    pub fn grid_points(&self) -> Vec<f64> {
        let half = (self.k / 2) as i64;
        (0..self.k)
            .map(|j| (j as i64 - half) as f64 * self.spacing)
            .collect()
    }

    /// Half-extent of the position grid.
    pub fn half_width(&self) -> f64 {
        (self.k / 2) as f64 * self.spacing
    }
}

/// Normalized Gaussian wave packet exp(-(x-c)^2 / 4 sigma^2 + i k0 x) on the
/// grid.
pub fn gaussian_packet(
    th: &ToyHilbert,
    center: f64,
    sigma: f64,
    k0: f64,
) -> Result<DVector<Complex<f64>>> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("packet width must be positive, got {sigma}")));
    }
    let mut psi = DVector::from_iterator(
        th.k,
        th.grid_points().iter().map(|&x| {
            let envelope = (-(x - center) * (x - center) / (4.0 * sigma * sigma)).exp();
            Complex::from_polar(envelope, k0 * x)
        }),
    );
    let norm = psi.norm();
    if !(norm > 0.0) {
        return Err(Error::Domain("packet underflowed to zero on this grid".into()));
    }
    psi /= Complex::new(norm, 0.0);
    Ok(psi)
}

/// Symmetrized drift Hamiltonian (1 - kappa) * (B p + p B) / 2 with
/// B = diag(beta). The metastable point kappa = 1 gives the zero matrix.
pub fn quantum_hamiltonian(
    beta_values: &[Complex<f64>],
    th: &ToyHilbert,
    kappa: f64,
) -> Result<DMatrix<Complex<f64>>> {
    if beta_values.len() != th.k {
        return Err(Error::Shape(format!(
            "{} drift values for a grid of {} sites",
            beta_values.len(),
            th.k
        )));
    }
    if let Some(bad) = beta_values.iter().find(|b| b.im != 0.0 || !b.re.is_finite()) {
        return Err(Error::Domain(format!(
            "drift must be real and finite on the grid, found {bad}"
        )));
    }
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Domain(format!("kappa must lie in [0, 1], got {kappa}")));
    }
    if kappa == 1.0 {
        return Ok(DMatrix::zeros(th.k, th.k));
    }
    let b = DMatrix::from_fn(th.k, th.k, |i, j| {
        if i == j { beta_values[i] } else { Complex::new(0.0, 0.0) }
    });
    let sym = &b * &th.p_op + &th.p_op * &b;
    let scale = Complex::new((1.0 - kappa) * 0.5, 0.0);
    Ok(sym * scale)
}

fn hermitian_scale(h: &DMatrix<Complex<f64>>) -> Result<f64> {
    let scale = h.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let defect = hermiticity_defect(h);
    if defect > 1e-10 * scale.max(1.0) {
        return Err(Error::Domain(format!(
            "generator is not Hermitian: defect {defect:.3e} at scale {scale:.3e}"
        )));
    }
    Ok(scale)
}

/// Unitary U = exp(-i H dtau / hbar) built from the eigendecomposition of a
/// Hermitian generator.
pub struct HeisenbergPropagator {
    pub u: DMatrix<Complex<f64>>,
}

pub fn propagator(
    h: &DMatrix<Complex<f64>>,
    dtau: f64,
    hbar: f64,
) -> Result<HeisenbergPropagator> {
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    hermitian_scale(h)?;
    let eig = SymmetricEigen::new(h.clone());
    let k = h.nrows();
    let phases = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex::from_polar(1.0, -eig.eigenvalues[i] * dtau / hbar)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    Ok(HeisenbergPropagator { u })
}

impl HeisenbergPropagator {
    /// One Heisenberg step A -> U† A U.
    pub fn conjugate(&self, a: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
        self.u.adjoint() * a * &self.u
    }
}

/// Evolve an observable one step under a Hermitian generator.
pub fn heisenberg_step(
    a: &DMatrix<Complex<f64>>,
    h: &DMatrix<Complex<f64>>,
    dtau: f64,
    hbar: f64,
) -> Result<DMatrix<Complex<f64>>> {
    if a.nrows() != h.nrows() || a.ncols() != h.ncols() || a.nrows() != a.ncols() {
        return Err(Error::Shape(format!(
            "observable {}x{} against generator {}x{}",
            a.nrows(),
            a.ncols(),
            h.nrows(),
            h.ncols()
        )));
    }
    Ok(propagator(h, dtau, hbar)?.conjugate(a))
}

/// Expectation trajectory of the evolved position against the classical
/// drift integrated by the dynamics module.
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub tau: Vec<f64>,
    pub expect_x: Vec<f64>,
    pub classical_x: Vec<f64>,
    pub abs_error: Vec<f64>,
    pub max_rel_error: f64,
    /// True when the packet approached the grid edge and the run stopped
    /// early to avoid wrap-around.
    pub truncated: bool,
    pub steps_completed: usize,
}

/// Compare d<x>/dtau under the quantized drift generator with the classical
/// Hamilton flow for a constant drift b.
///
/// The generator is drift_factor times the symmetrized Hamiltonian, matching
/// the classical convention du/dtau = drift_factor * beta away from the
/// metastable point. The evolution runs in the generator eigenbasis, which
/// is algebraically the repeated conjugation A -> U† A U.
pub fn correspondence_check(
    b: f64,
    th: &ToyHilbert,
    state: &DVector<Complex<f64>>,
    dtau: f64,
    steps: usize,
    drift_factor: f64,
) -> Result<CorrespondenceReport> {
    if state.len() != th.k {
        return Err(Error::Shape(format!(
            "state of length {} on a grid of {} sites",
            state.len(),
            th.k
        )));
    }
    if !(dtau > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {dtau}")));
    }
    if steps == 0 {
        return Err(Error::Domain("correspondence needs at least one step".into()));
    }
    let beta_grid: Vec<Complex<f64>> = vec![Complex::new(b, 0.0); th.k];
    let g = quantum_hamiltonian(&beta_grid, th, 0.0)? * Complex::new(drift_factor, 0.0);
    hermitian_scale(&g)?;
    let eig = SymmetricEigen::new(g);
    let phi = eig.eigenvectors.adjoint() * state;
    let x_tilde = eig.eigenvectors.adjoint() * &th.x_op * &eig.eigenvectors;

    // classical oracle: one molecule under the constant drift field
    let metric = LorentzMetric::minkowski(2);
    let field = BetaField::Constant { values: vec![b, 0.0, 0.0, 0.0] };
    let s = RandersStructure::new(&metric, 1, field)?;
    let sched = KappaSchedule::smoothstep(1e6)?;
    let x0 = expectation(&th.x_op, state).re;
    let pt0 = PhasePoint {
        u: DVector::from_vec(vec![x0, 0.0, 0.0, 0.0]),
        p: DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]),
    };
    let traj = integrate(&s, &sched, 0.0, &pt0, (0.0, steps as f64 * dtau), dtau, drift_factor)?;

    let edge = th.half_width() - 4.0 * th.spacing;
    if x0.abs() > edge {
        return Err(Error::Setup(format!(
            "packet center {x0} starts outside the usable grid interior |x| <= {edge}"
        )));
    }
    let mut tau = Vec::with_capacity(steps + 1);
    let mut expect_x = Vec::with_capacity(steps + 1);
    let mut classical_x = Vec::with_capacity(steps + 1);
    let mut truncated = false;
    let mut steps_completed = 0usize;
    for n in 0..=steps {
        let t = n as f64 * dtau;
        // wrap guard on the predicted center: past this point the periodic
        // grid folds the packet back and <x> stops tracking the drift
        let cx = traj.states[n].u[0];
        if cx.abs() > edge {
            truncated = true;
            break;
        }
        // A(t) in the eigenbasis is elementwise phases on x_tilde; its
        // expectation is (e^{-i L t} phi)† x_tilde (e^{-i L t} phi)
        let w = DVector::from_fn(th.k, |j, _| {
            Complex::from_polar(1.0, -eig.eigenvalues[j] * t / th.hbar) * phi[j]
        });
        let ex = w.dotc(&(&x_tilde * &w)).re / w.dotc(&w).re;
        tau.push(t);
        expect_x.push(ex);
        classical_x.push(cx);
        steps_completed = n;
    }
    let abs_error: Vec<f64> = expect_x
        .iter()
        .zip(&classical_x)
        .map(|(q, c)| (q - c).abs())
        .collect();
    let displacement = (classical_x.last().unwrap() - classical_x[0]).abs().max(f64::MIN_POSITIVE);
    let reference = if displacement > 1e-12 { displacement } else { 1.0 };
    let max_rel_error = abs_error.iter().fold(0.0f64, |a, &e| a.max(e)) / reference;
    Ok(CorrespondenceReport {
        tau,
        expect_x,
        classical_x,
        abs_error,
        max_rel_error,
        truncated,
        steps_completed,
    })
}

/// Default toy grid used by the correspondence scenario.
pub fn default_toy_hilbert() -> Result<ToyHilbert> {
    build_operators(256, 0.1, 1.0)
}

pub const DEFAULT_CORRESPONDENCE_DRIFT: f64 = 0.1;
pub const DEFAULT_CORRESPONDENCE_DTAU: f64 = 0.01;
pub const DEFAULT_CORRESPONDENCE_STEPS: usize = 100;

/// Convenience wrapper at the default scale with the default drift factor.
pub fn default_correspondence() -> Result<CorrespondenceReport> {
    let th = default_toy_hilbert()?;
    let psi = gaussian_packet(&th, 0.0, 1.0, 0.0)?;
    correspondence_check(
        DEFAULT_CORRESPONDENCE_DRIFT,
        &th,
        &psi,
        DEFAULT_CORRESPONDENCE_DTAU,
        DEFAULT_CORRESPONDENCE_STEPS,
        DEFAULT_DRIFT_FACTOR,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn frob(m: &DMatrix<Complex<f64>>) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn grid_size_must_be_power_of_two() {
        assert!(matches!(build_operators(7, 0.1, 1.0), Err(Error::Capability(_))));
        assert!(matches!(build_operators(12, 0.1, 1.0), Err(Error::Capability(_))));
        assert!(matches!(build_operators(4, 0.1, 1.0), Err(Error::Capability(_))));
        assert!(build_operators(8, 0.1, 1.0).is_ok());
        assert!(build_operators(16, 0.0, 1.0).is_err());
        assert!(build_operators(16, 0.1, 0.0).is_err());
    }

    #[test]
    fn position_is_diagonal_on_orthonormal_basis() {
        let th = build_operators(8, 0.5, 1.0).unwrap();
        let xs = th.grid_points();
        assert_eq!(xs[0], -2.0);
        assert_eq!(xs[4], 0.0);
        for j in 0..8 {
            let mut e = DVector::from_element(8, Complex::new(0.0, 0.0));
            e[j] = Complex::new(1.0, 0.0);
            let xe = &th.x_op * &e;
            for i in 0..8 {
                let want = if i == j { Complex::new(xs[j], 0.0) } else { Complex::new(0.0, 0.0) };
                assert_eq!(xe[i], want);
            }
            // Kronecker orthonormality
            for i in 0..8 {
                let mut f = DVector::from_element(8, Complex::new(0.0, 0.0));
                f[i] = Complex::new(1.0, 0.0);
                let ip = f.dotc(&e);
                assert_eq!(ip, if i == j { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) });
            }
        }
    }

    #[test]
    fn operators_are_hermitian() {
        for k in [8, 32, 128] {
            let th = build_operators(k, 0.2, 1.0).unwrap();
            assert_eq!(hermiticity_defect(&th.x_op), 0.0);
            assert!(hermiticity_defect(&th.p_op) < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn momentum_differentiates_plane_waves() {
        // exact eigenvectors: e_j = exp(i k_m x_j) with eigenvalue hbar k_m
        let th = build_operators(32, 0.25, 1.0).unwrap();
        let xs = th.grid_points();
        let km = std::f64::consts::TAU * 3.0 / (32.0 * 0.25);
        let wave = DVector::from_iterator(32, xs.iter().map(|&x| Complex::from_polar(1.0, km * x)));
        let pw = &th.p_op * &wave;
        for j in 0..32 {
            assert_relative_eq!(pw[j].re, (wave[j] * km).re, epsilon = 1e-10);
            assert_relative_eq!(pw[j].im, (wave[j] * km).im, epsilon = 1e-10);
        }
    }

    #[test]
    fn commutator_approaches_canonical_on_smooth_states() {
        // fixed physical extent, refining grid: defect collapses
        let defect_of = |k: usize, spacing: f64| {
            let th = build_operators(k, spacing, 1.0).unwrap();
            let psi = gaussian_packet(&th, 0.0, 0.15, 0.0).unwrap();
            let comm = commutator(&th.x_op, &th.p_op);
            let eye = DMatrix::<Complex<f64>>::identity(k, k) * Complex::new(0.0, 1.0);
            ((&comm - &eye) * &psi).norm()
        };
        let coarse = defect_of(64, 0.2);
        let fine = defect_of(128, 0.1);
        assert!(coarse > 1e-4, "coarse defect {coarse}");
        assert!(fine < 1e-6, "fine defect {fine}");
        assert!(fine < coarse / 100.0);

        // the contract grid
        let th = build_operators(256, 0.1, 1.0).unwrap();
        let psi = gaussian_packet(&th, 0.0, 1.0, 0.0).unwrap();
        let comm = commutator(&th.x_op, &th.p_op);
        let eye = DMatrix::<Complex<f64>>::identity(256, 256) * Complex::new(0.0, 1.0);
        let defect = ((&comm - &eye) * &psi).norm();
        assert!(defect < 1e-6, "defect {defect}");
    }

    #[test]
    fn hamiltonian_symmetrization() {
        let th = build_operators(32, 0.25, 1.0).unwrap();
        // kappa = 1: exact zero matrix
        let beta: Vec<Complex<f64>> =
            (0..32).map(|j| Complex::new(0.1 + 0.01 * j as f64, 0.0)).collect();
        let frozen = quantum_hamiltonian(&beta, &th, 1.0).unwrap();
        assert!(frozen.iter().all(|z| z.re == 0.0 && z.im == 0.0));

        // constant drift: H = (1 - kappa) b p
        let b = 0.3;
        let constant = vec![Complex::new(b, 0.0); 32];
        let h = quantum_hamiltonian(&constant, &th, 0.25).unwrap();
        let want = &th.p_op * Complex::new(0.75 * b, 0.0);
        assert!(frob(&(&h - &want)) <= 1e-14 * frob(&want));

        // position-dependent drift stays Hermitian through symmetrization
        let h = quantum_hamiltonian(&beta, &th, 0.0).unwrap();
        assert!(hermiticity_defect(&h) < 1e-12);

        // rejects complex drift, out-of-range kappa, wrong length
        let mut complex_beta = constant.clone();
        complex_beta[3] = Complex::new(0.1, 0.2);
        assert!(matches!(quantum_hamiltonian(&complex_beta, &th, 0.0), Err(Error::Domain(_))));
        assert!(quantum_hamiltonian(&constant, &th, -0.1).is_err());
        assert!(quantum_hamiltonian(&constant, &th, 1.1).is_err());
        assert!(matches!(
            quantum_hamiltonian(&constant[..30], &th, 0.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn propagator_is_unitary_and_norm_preserving() {
        let th = build_operators(32, 0.25, 1.0).unwrap();
        let beta: Vec<Complex<f64>> =
            (0..32).map(|j| Complex::new(0.2 * (j as f64 * 0.3).sin(), 0.0)).collect();
        let h = quantum_hamiltonian(&beta, &th, 0.0).unwrap();
        let prop = propagator(&h, 0.05, 1.0).unwrap();
        let gram = prop.u.adjoint() * &prop.u;
        let eye = DMatrix::<Complex<f64>>::identity(32, 32);
        assert!(frob(&(&gram - &eye)) < 1e-12, "unitarity defect {}", frob(&(&gram - &eye)));
        let psi = gaussian_packet(&th, 0.5, 0.7, 1.0).unwrap();
        let evolved = &prop.u * &psi;
        assert!((evolved.norm() - psi.norm()).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let th = build_operators(8, 0.5, 1.0).unwrap();
        let mut h = quantum_hamiltonian(&[Complex::new(0.1, 0.0); 8], &th, 0.0).unwrap();
        h[(0, 1)] += Complex::new(0.5, 0.0);
        assert!(matches!(propagator(&h, 0.1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(heisenberg_step(&th.x_op, &h, 0.1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn commuting_observable_is_fixed() {
        let th = build_operators(16, 0.25, 1.0).unwrap();
        let h = quantum_hamiltonian(&vec![Complex::new(0.4, 0.0); 16], &th, 0.0).unwrap();
        // p commutes with b p
        let evolved = heisenberg_step(&th.p_op, &h, 0.3, 1.0).unwrap();
        assert!(frob(&(&evolved - &th.p_op)) < 1e-12);
    }

    #[test]
    fn evolution_preserves_spectrum() {
        let th = build_operators(16, 0.25, 1.0).unwrap();
        let beta: Vec<Complex<f64>> =
            (0..16).map(|j| Complex::new(0.3 + 0.05 * j as f64, 0.0)).collect();
        let h = quantum_hamiltonian(&beta, &th, 0.0).unwrap();
        let evolved = heisenberg_step(&th.x_op, &h, 0.7, 1.0).unwrap();
        assert!(hermiticity_defect(&evolved) < 1e-10);
        let mut before = SymmetricEigen::new(th.x_op.clone()).eigenvalues.as_slice().to_vec();
        let mut after = SymmetricEigen::new(evolved).eigenvalues.as_slice().to_vec();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn short_time_derivative_matches_commutator() {
        let th = build_operators(16, 0.25, 1.0).unwrap();
        let beta: Vec<Complex<f64>> =
            (0..16).map(|j| Complex::new(0.2 * (j as f64 * 0.5).cos(), 0.0)).collect();
        let h = quantum_hamiltonian(&beta, &th, 0.0).unwrap();
        let target = commutator(&h, &th.x_op) * Complex::new(0.0, 1.0);
        // symmetric difference: step error is O(dtau^2), so halving quarters it
        let err_at = |dtau: f64| {
            let fwd = heisenberg_step(&th.x_op, &h, dtau, 1.0).unwrap();
            let bwd = heisenberg_step(&th.x_op, &h, -dtau, 1.0).unwrap();
            let derivative = (fwd - bwd) / Complex::new(2.0 * dtau, 0.0);
            frob(&(&derivative - &target))
        };
        let e1 = err_at(0.08);
        let e2 = err_at(0.04);
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "halving ratio {ratio} ({e1} -> {e2})");
    }

    #[test]
    fn zero_drift_keeps_expectation_fixed() {
        let th = build_operators(64, 0.2, 1.0).unwrap();
        let psi = gaussian_packet(&th, 0.3, 0.8, 0.0).unwrap();
        let rep = correspondence_check(0.0, &th, &psi, 0.05, 20, 2.0).unwrap();
        assert!(!rep.truncated);
        for (q, c) in rep.expect_x.iter().zip(&rep.classical_x) {
            assert!((q - rep.expect_x[0]).abs() < 1e-12);
            assert!((c - rep.classical_x[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn default_scale_correspondence_is_tight() {
        let rep = default_correspondence().unwrap();
        assert!(!rep.truncated);
        assert_eq!(rep.steps_completed, 100);
        assert!(rep.max_rel_error < 1e-6, "relative error {}", rep.max_rel_error);
        // total drift = drift_factor * b * steps * dtau = 2 * 0.1 * 1 = 0.2
        let drift = rep.expect_x.last().unwrap() - rep.expect_x[0];
        assert_relative_eq!(drift, 0.2, max_relative = 1e-6);
    }

    #[test]
    fn drift_rate_is_linear_in_b() {
        let th = build_operators(128, 0.1, 1.0).unwrap();
        let psi = gaussian_packet(&th, -1.0, 0.5, 0.0).unwrap();
        let r1 = correspondence_check(0.05, &th, &psi, 0.01, 50, 2.0).unwrap();
        let r2 = correspondence_check(0.10, &th, &psi, 0.01, 50, 2.0).unwrap();
        let d1 = r1.expect_x.last().unwrap() - r1.expect_x[0];
        let d2 = r2.expect_x.last().unwrap() - r2.expect_x[0];
        assert_relative_eq!(d2, 2.0 * d1, max_relative = 1e-6);
    }

    #[test]
    fn wrap_truncates_with_warning_flag() {
        let th = build_operators(64, 0.1, 1.0).unwrap();
        // start near the right edge and push outward hard
        let psi = gaussian_packet(&th, 2.2, 0.3, 0.0).unwrap();
        let rep = correspondence_check(1.0, &th, &psi, 0.1, 50, 2.0).unwrap();
        assert!(rep.truncated);
        assert!(rep.steps_completed < 50);
        assert_eq!(rep.expect_x.len(), rep.steps_completed + 1);
    }
}
