//! Integrate the drift Hamiltonian at frozen internal time. Two properties
//! matter: the energy along the trajectory is conserved down to roundoff,
//! and the endpoint error against a fine-step reference shrinks by the
//! fourth-order factor 16 when the step is halved.

use hamilton_randers::dynamics::{drift_hamiltonian, integrate, DEFAULT_DRIFT_FACTOR};
use hamilton_randers::flow::KappaSchedule;
use hamilton_randers::geometry::{BetaField, LorentzMetric, PhasePoint, RandersStructure};
use nalgebra::DVector;

fn main() -> hamilton_randers::Result<()> {
    let d = 4;
    let dim = 2 * d; // u and p each span the doubled molecular block
    let g4 = LorentzMetric::minkowski(d);
    // Phase offset keeps beta(0) nonzero, so the starting energy is not 0.
    let beta = BetaField::Sinusoidal {
        amplitude: vec![0.0, 0.25, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0],
        frequency: vec![1.0; dim],
        phase: Some(vec![0.7; dim]),
    };
    let s = RandersStructure::new(&g4, 1, beta)?;
    let sched = KappaSchedule::smoothstep(1.0)?;

    let mut p = DVector::zeros(dim);
    p[0] = 1.0;
    p[1] = 0.2;
    let pt0 = PhasePoint::new(DVector::zeros(dim), p)?;

    // Energy conservation: the drift Hamiltonian generates its own flow, so
    // along the trajectory it may wobble only at integrator roundoff.
    let traj = integrate(&s, &sched, 0.0, &pt0, (0.0, 1.0), 1e-3, DEFAULT_DRIFT_FACTOR)?;
    let h0 = drift_hamiltonian(&s, &traj.states[0]);
    let drift = traj
        .states
        .iter()
        .map(|pt| (drift_hamiltonian(&s, pt) - h0).abs())
        .fold(0.0, f64::max)
        / h0.abs();
    println!("relative energy drift over 1000 steps: {drift:.3e}");
    assert!(drift < 1e-9);

    // Fourth-order convergence: measure the endpoint against a reference
    // trajectory 64x finer than the finest step under test.
    let reference = integrate(&s, &sched, 0.0, &pt0, (0.0, 1.0), 1.0 / 4096.0, DEFAULT_DRIFT_FACTOR)?;
    let target = &reference.last_state().unwrap().u;
    let endpoint_err = |dt: f64| -> hamilton_randers::Result<f64> {
        let t = integrate(&s, &sched, 0.0, &pt0, (0.0, 1.0), dt, DEFAULT_DRIFT_FACTOR)?;
        Ok((t.last_state().unwrap().u.clone() - target).norm())
    };
    let errs = [endpoint_err(0.1)?, endpoint_err(0.05)?, endpoint_err(0.025)?];
    println!("{:>8}  {:>12}  {:>8}", "dt", "endpoint err", "ratio");
    let mut prev: Option<f64> = None;
    for (dt, err) in [0.1, 0.05, 0.025].iter().zip(&errs) {
        let ratio = prev.map_or(f64::NAN, |p| p / err);
        println!("{dt:>8}  {err:>12.3e}  {ratio:>8.1}");
        prev = Some(*err);
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!(
            (8.0..32.0).contains(&ratio),
            "expected near-16x error reduction, got {ratio:.1}x"
        );
    }
    Ok(())
}
