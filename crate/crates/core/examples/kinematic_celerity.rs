//! The apparent celerity of a world line grows with the drift amplitude and
//! crosses the Lorentzian ceiling c before the structural bound A_max is
//! reached — without ever leaving the causal cone of the underlying
//! geometry. At the bound itself the expression degenerates and the library
//! refuses to evaluate it.

use hamilton_randers::dynamics::{apparent_celerity, KinematicLimits};
use hamilton_randers::Error;

fn main() -> hamilton_randers::Result<()> {
    let limits = KinematicLimits::new(1.0, 1e-3)?;
    let a_max = limits.a_max;
    let v_tilde = 0.6 * limits.c_max;

    println!("coordinate speed: {v_tilde}");
    println!("structural amplitude bound A_max = {a_max:.6}");
    println!("{:>12}  {:>12}", "a / A_max", "celerity / c");
    for frac in [0.0, 0.2, 0.4, 0.6, 0.8, 0.9] {
        let v = apparent_celerity(v_tilde, frac * a_max, &limits)?;
        println!("{frac:12.2}  {:12.6}", v / limits.c_max);
    }

    // Pinned values: at zero drift only the Lorentz factor acts, 0.6c ->
    // 0.75c; at 0.8 A_max the acceleration factor lifts it to 1.25c.
    let v0 = apparent_celerity(v_tilde, 0.0, &limits)?;
    let v8 = apparent_celerity(v_tilde, 0.8 * a_max, &limits)?;
    assert!((v0 / limits.c_max - 0.75).abs() < 1e-12);
    assert!((v8 / limits.c_max - 1.25).abs() < 1e-12);
    assert!(v8 > limits.c_max, "strong drift pushes the celerity past c");

    match apparent_celerity(v_tilde, a_max, &limits) {
        Err(Error::Kinematics(msg)) => println!("at a = A_max: rejected ({msg})"),
        other => panic!("expected a kinematics error at the bound, got {other:?}"),
    }
    Ok(())
}
