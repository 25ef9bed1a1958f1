//! Split a drift Hamiltonian into a globally 1-Lipschitz core plus a matter
//! remainder supported outside a compact box. The decomposition reconstructs
//! the original exactly on the doubled box, the remainder vanishes
//! identically inside, and the certified slope of the core stays below 1.
//! The same machinery yields the interaction-strength ratio, exactly 2 at
//! the reference scale and astronomically small for an electron.

use hamilton_randers::constants::{PhysicalConstants, BOHR_RADIUS_SI, ELECTRON_MASS_SI};
use hamilton_randers::lipschitz::{
    certify_lipschitz_on_compact, decomposition_residual, newton_alpha, radial_decompose,
    BoxDomain, DecompositionParts, RadialProfile,
};
use hamilton_randers::rng::stream_rng;
use nalgebra::DVector;

fn main() -> hamilton_randers::Result<()> {
    // H = b . p on the flattened (u, p) box: linear, slope |b|.
    let b = [0.5, 0.25, 0.1, 0.05];
    let h = move |z: &DVector<f64>| -> f64 { (0..4).map(|k| b[k] * z[4 + k]).sum() };
    let k_box = BoxDomain::centered(&[1.0; 8])?;

    let cert = certify_lipschitz_on_compact(h, &k_box, 20_000, 101)?;
    println!(
        "raw slope estimate {:.6}, normalized {:.6}, certificate pass: {}",
        cert.raw_estimate, cert.normalized_estimate, cert.pass
    );

    let scale = cert.normalization;
    let h_norm = move |z: &DVector<f64>| h(z) / scale;
    let dec = radial_decompose(h_norm, k_box.clone(), RadialProfile::Rational { s0: 4.0 }, 20_000, 102)?;

    // Interior: the matter part is identically zero, so core + matter == H.
    let mut rng = stream_rng(103, 0);
    let inside: Vec<DVector<f64>> = (0..5_000).map(|_| k_box.sample(&mut rng)).collect();
    let residual = decomposition_residual(h_norm, &dec, &inside)?;
    let matter_max = inside
        .iter()
        .map(|z| dec.matter_part(z).abs())
        .fold(0.0, f64::max);
    println!("reconstruction residual inside the box: {residual:.3e}");
    println!("matter remainder inside the box:        {matter_max:.3e}");
    assert!(residual < 1e-12);
    assert_eq!(matter_max, 0.0);

    // The extracted core stays 1-Lipschitz even on the doubled box.
    let doubled = k_box.scale(2.0)?;
    let core_cert =
        certify_lipschitz_on_compact(|z| dec.lipschitz_part(z), &doubled, 20_000, 104)?;
    println!("core slope on the doubled box: {:.6}", core_cert.normalized_estimate);
    assert!(core_cert.pass);

    // Interaction-strength ratio: exactly 2 at the reference scale, and
    // utterly negligible for an electron at atomic radius.
    let constants = PhysicalConstants::si();
    let m_p = constants.planck_mass();
    let l_p = constants.planck_length();
    let reference = newton_alpha(m_p, m_p, l_p, 1.0, &constants)?;
    let electron = newton_alpha(ELECTRON_MASS_SI, ELECTRON_MASS_SI, BOHR_RADIUS_SI, 1.0, &constants)?;
    println!("alpha at the reference scale: {}", reference.alpha);
    println!("alpha for an electron:        {:.3e}", electron.alpha);
    assert_eq!(reference.alpha, 2.0);
    assert!(electron.alpha < 1e-30);
    Ok(())
}
