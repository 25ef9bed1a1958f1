//! External-time dynamics: Hamilton equations of the drift Hamiltonian,
//! fixed-step integration, slow-time reparameterization, and the
//! maximal-acceleration kinematics with its apparent-celerity formula.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::KappaSchedule;
use crate::geometry::{observer_metric, LorentzMetric, ObserverFrame, ObserverMetric, PhasePoint, RandersStructure};

/// Factor multiplying the drift in the equations of motion. The Hamilton
/// equations as printed carry 2; a value of 1 reproduces the bare
/// semi-spray reading. Runs record which convention was used.
pub const DEFAULT_DRIFT_FACTOR: f64 = 2.0;

/// Kinematic bounds derived from a minimal length: `a_max = c_max^2 / l_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicLimits {
    pub c_max: f64,
    pub l_min: f64,
    pub a_max: f64,
}

impl KinematicLimits {
    pub fn new(c_max: f64, l_min: f64) -> Result<Self> {
        if !(c_max > 0.0) || !(l_min > 0.0) {
            return Err(Error::Kinematics(format!(
                "limits must be strictly positive: c_max = {c_max}, l_min = {l_min}"
            )));
        }
        Ok(Self { c_max, l_min, a_max: c_max * c_max / l_min })
    }

    /// Natural units: unit speed and unit minimal length.
    pub fn natural() -> Self {
        Self { c_max: 1.0, l_min: 1.0, a_max: 1.0 }
    }
}

impl Default for KinematicLimits {
    fn default() -> Self {
        Self::natural()
    }
}

/// Celerity of an accelerated observer:
/// `v = v_tilde / (sqrt(1 - a^2/a_max^2) * sqrt(1 - v_tilde^2/c^2))`.
///
/// Monotone in both arguments; exceeds `c_max` once the acceleration factor
/// outweighs the ordinary Lorentz factor. Domain is the open box
/// `0 <= v_tilde < c_max`, `0 <= a < a_max`.
pub fn apparent_celerity(v_tilde: f64, a: f64, limits: &KinematicLimits) -> Result<f64> {
    if !(0.0..limits.c_max).contains(&v_tilde) {
        return Err(Error::Kinematics(format!(
            "coordinate speed {v_tilde} outside [0, {})",
            limits.c_max
        )));
    }
    if !(0.0..limits.a_max).contains(&a) {
        return Err(Error::Kinematics(format!(
            "proper acceleration {a} outside [0, {})",
            limits.a_max
        )));
    }
    let acc = (1.0 - (a / limits.a_max).powi(2)).sqrt();
    let lor = (1.0 - (v_tilde / limits.c_max).powi(2)).sqrt();
    Ok(v_tilde / (acc * lor))
}

/// Time-ordered sequence of phase points.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<PhasePoint>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::Shape(format!(
                "{} times vs {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("trajectory times must be strictly increasing".into()));
        }
        Ok(Self { times, states })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&PhasePoint> {
        self.states.last()
    }
}

/// Right-hand side of the drift Hamilton equations at frozen internal time:
/// `u' = f (1 - kappa(t)) beta(u)`, `p'_i = -f (1 - kappa(t)) (d beta^k/d u^i) p_k`
/// with `f` the drift factor. The u-subsystem never reads p.
pub fn hamilton_rhs(
    s: &RandersStructure,
    sched: &KappaSchedule,
    t: f64,
    pt: &PhasePoint,
    drift_factor: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let scale = drift_factor * (1.0 - sched.kappa(t)?);
    let u_dot = s.beta().eval(&pt.u) * scale;
    let p_dot = s.beta().jacobian(&pt.u).transpose() * &pt.p * (-scale);
    Ok((u_dot, p_dot))
}

const DIVERGENCE_GUARD: f64 = 1e12;

/// Classical fixed-step fourth-order Runge-Kutta on `hamilton_rhs` with the
/// internal time frozen at `t` (the system is autonomous in tau). Records
/// every step including the initial state.
pub fn integrate(
    s: &RandersStructure,
    sched: &KappaSchedule,
    t: f64,
    pt0: &PhasePoint,
    span: (f64, f64),
    dt: f64,
    drift_factor: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step size must be positive, got {dt}")));
    }
    let (tau0, tau1) = span;
    if tau1 <= tau0 {
        return Err(Error::Domain(format!("degenerate span [{tau0}, {tau1}]")));
    }
    // Resolve the kappa factor once; the flow is autonomous in tau.
    let scale = drift_factor * (1.0 - sched.kappa(t)?);
    let rhs = |pt: &PhasePoint| -> (DVector<f64>, DVector<f64>) {
        (
            s.beta().eval(&pt.u) * scale,
            s.beta().jacobian(&pt.u).transpose() * &pt.p * (-scale),
        )
    };

    let n_steps = ((tau1 - tau0) / dt).round() as usize;
    let n_steps = n_steps.max(1);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut cur = pt0.clone();
    times.push(tau0);
    states.push(cur.clone());
    for step in 0..n_steps {
        let (ku1, kp1) = rhs(&cur);
        let half1 = PhasePoint { u: &cur.u + &ku1 * (dt / 2.0), p: &cur.p + &kp1 * (dt / 2.0) };
        let (ku2, kp2) = rhs(&half1);
        let half2 = PhasePoint { u: &cur.u + &ku2 * (dt / 2.0), p: &cur.p + &kp2 * (dt / 2.0) };
        let (ku3, kp3) = rhs(&half2);
        let full = PhasePoint { u: &cur.u + &ku3 * dt, p: &cur.p + &kp3 * dt };
        let (ku4, kp4) = rhs(&full);
        let u_next = &cur.u + (ku1 + ku2 * 2.0 + ku3 * 2.0 + ku4) * (dt / 6.0);
        let p_next = &cur.p + (kp1 + kp2 * 2.0 + kp3 * 2.0 + kp4) * (dt / 6.0);
        let magnitude = u_next.norm().max(p_next.norm());
        if !magnitude.is_finite() || magnitude > DIVERGENCE_GUARD {
            let last_valid = cur.u.iter().chain(cur.p.iter()).copied().collect();
            return Err(Error::Divergence { step, magnitude, last_valid });
        }
        cur = PhasePoint { u: u_next, p: p_next };
        times.push(tau0 + (step + 1) as f64 * dt);
        states.push(cur.clone());
    }
    Trajectory::new(times, states)
}

/// Drift Hamiltonian `H = beta^k(u) p_k`, the conserved quantity of the
/// frozen-kappa flow.
pub fn drift_hamiltonian(s: &RandersStructure, pt: &PhasePoint) -> f64 {
    s.beta().eval(&pt.u).dot(&pt.p)
}

/// Slow time `tau = tau_tilde / (1 - kappa(t))`; the reparameterization that
/// absorbs the flow attenuation. Singular exactly at kappa = 1.
pub fn slow_time(sched: &KappaSchedule, t: f64, tau_tilde: f64) -> Result<f64> {
    let kappa = sched.kappa(t)?;
    if kappa >= 1.0 {
        return Err(Error::Reparameterization { t });
    }
    Ok(tau_tilde / (1.0 - kappa))
}

/// Decompose the drift at `u` into its time-inversion-odd and -even parts:
/// `beta_x = (beta - T beta)/2` pairs with p_x, `beta_y = (beta + T beta)/2`
/// with p_y, where `T` negates the p_x-conjugate components. The pieces
/// recompose exactly.
pub fn beta_split(s: &RandersStructure, u: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let beta = s.beta().eval(u);
    let d = s.base_dim();
    let mut beta_x = DVector::zeros(beta.len());
    let mut beta_y = DVector::zeros(beta.len());
    for k in 0..s.n_molecules() {
        let base = 2 * d * k;
        for i in 0..d {
            beta_x[base + i] = beta[base + i];
            beta_y[base + d + i] = beta[base + d + i];
        }
    }
    (beta_x, beta_y)
}

/// Report from the drift-conservation check: in flat space a parallel
/// (constant) drift has vanishing Jacobian everywhere.
#[derive(Debug, Clone, Serialize)]
pub struct BerwaldReport {
    pub max_jacobian_norm: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const BERWALD_TOLERANCE: f64 = 1e-12;

/// Max Frobenius norm of the drift Jacobian over configuration probes.
pub fn berwald_validator(
    s: &RandersStructure,
    probes: &[DVector<f64>],
    tolerance: f64,
) -> Result<BerwaldReport> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("berwald_validator needs probes".into()));
    }
    let max = probes
        .iter()
        .map(|u| s.beta().jacobian(u).norm())
        .fold(0.0f64, f64::max);
    Ok(BerwaldReport { max_jacobian_norm: max, tolerance, pass: max <= tolerance })
}

/// One bound violation found along a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct KinematicFlag {
    pub molecule: usize,
    pub sample_index: usize,
    pub kind: FlagKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagKind {
    Speed,
    Acceleration,
}

/// Per-molecule kinematics summary of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct KinematicsReport {
    pub max_speed: Vec<f64>,
    pub max_acceleration: Vec<f64>,
    pub max_onshell_residual: f64,
    pub flags: Vec<KinematicFlag>,
    pub pass: bool,
}

fn molecule_x(state: &PhasePoint, d: usize, k: usize) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|i| state.u[2 * d * k + i]))
}

fn molecule_y(state: &PhasePoint, d: usize, k: usize) -> DVector<f64> {
    DVector::from_iterator(d, (0..d).map(|i| state.u[2 * d * k + d + i]))
}

/// Finite-difference speed and proper-acceleration audit of a trajectory.
///
/// Velocities are central differences of the position block, accelerations
/// the three-point second difference, both measured in the positive-definite
/// observer norm of the e_0 frame. The on-shell residual is the observer
/// norm of `x' - y` at interior samples.
pub fn kinematics_check(
    traj: &Trajectory,
    limits: &KinematicLimits,
    g4: &LorentzMetric,
    n_molecules: usize,
) -> Result<KinematicsReport> {
    if traj.len() < 3 {
        return Err(Error::Domain(format!(
            "kinematics check needs at least 3 samples, got {}",
            traj.len()
        )));
    }
    let d = g4.dim();
    let expect = 2 * d * n_molecules;
    if traj.states[0].dim() != expect {
        return Err(Error::Shape(format!(
            "trajectory states have dimension {}, layout expects {expect}",
            traj.states[0].dim()
        )));
    }
    let mut e0 = DVector::zeros(d);
    e0[0] = 1.0;
    let om: ObserverMetric = observer_metric(g4, &ObserverFrame { w: e0 })?;

    let mut max_speed = vec![0.0f64; n_molecules];
    let mut max_acc = vec![0.0f64; n_molecules];
    let mut max_onshell = 0.0f64;
    let mut flags = Vec::new();
    for i in 1..traj.len() - 1 {
        let (t_prev, t_mid, t_next) = (traj.times[i - 1], traj.times[i], traj.times[i + 1]);
        let h1 = t_mid - t_prev;
        let h2 = t_next - t_mid;
        for k in 0..n_molecules {
            let x_prev = molecule_x(&traj.states[i - 1], d, k);
            let x_mid = molecule_x(&traj.states[i], d, k);
            let x_next = molecule_x(&traj.states[i + 1], d, k);
            let vel = (&x_next - &x_prev) / (h1 + h2);
            // non-uniform three-point second difference
            let acc = (&x_next * h1 - &x_mid * (h1 + h2) + &x_prev * h2)
                * (2.0 / (h1 * h2 * (h1 + h2)));
            let speed = om.norm(&vel);
            let a = om.norm(&acc);
            max_speed[k] = max_speed[k].max(speed);
            max_acc[k] = max_acc[k].max(a);
            if speed > limits.c_max {
                flags.push(KinematicFlag { molecule: k, sample_index: i, kind: FlagKind::Speed, value: speed });
            }
            if a > limits.a_max {
                flags.push(KinematicFlag {
                    molecule: k,
                    sample_index: i,
                    kind: FlagKind::Acceleration,
                    value: a,
                });
            }
            let y_mid = molecule_y(&traj.states[i], d, k);
            max_onshell = max_onshell.max(om.norm(&(&vel - &y_mid)));
        }
    }
    let pass = flags.is_empty();
    Ok(KinematicsReport { max_speed, max_acceleration: max_acc, max_onshell_residual: max_onshell, flags, pass })
}
