//! Build the phase-space geometry for a handful of molecules and probe it:
//! the norm of a causal momentum, the fundamental tensor at that point, and
//! the hyperboloid-averaged metric the interpolation flow targets.

use hamilton_randers::geometry::{
    averaged_metric, cone_contains, fundamental_tensor, hr_value, BetaField, HyperboloidSampler,
    LorentzMetric, PhasePoint, RandersStructure,
};
use nalgebra::DVector;

fn main() -> hamilton_randers::Result<()> {
    let d = 4;
    let n_molecules = 3;
    let g4 = LorentzMetric::minkowski(d);
    // Each molecule carries a doubled block of 2d coordinates; u and p both
    // have length 2 d N. The drift must stay below unit norm for convexity.
    let block = 2 * d;
    let dim = block * n_molecules;
    let mut beta_values = vec![0.0; dim];
    beta_values[1] = 0.3;
    beta_values[2] = 0.1;
    let s = RandersStructure::new(&g4, n_molecules, BetaField::Constant { values: beta_values })?;
    println!("base dim d = {}, molecules N = {}", s.base_dim(), s.n_molecules());
    println!("u and p each live in R^{}", s.phase_dim());

    // One timelike momentum per molecule block.
    let mut p = DVector::zeros(dim);
    for m in 0..n_molecules {
        p[m * block] = 1.0;
        p[m * block + 1] = 0.2;
    }
    let pt = PhasePoint::new(DVector::zeros(dim), p.clone())?;
    println!("momentum inside causal cone: {}", cone_contains(&s, &p));
    println!("norm F(u, p) = {:.6}", hr_value(&s, &pt)?);

    // The fundamental tensor is the velocity-dependent metric. The drift
    // perturbs the flat blocks but cannot flip any eigenvalue: the Lorentz
    // signature (2N positive, (2d-2)N negative directions) survives.
    let g = fundamental_tensor(&s, &pt)?;
    let eigs = g.symmetric_eigenvalues();
    let positive = eigs.iter().filter(|&&e| e > 0.0).count();
    let negative = eigs.iter().filter(|&&e| e < 0.0).count();
    println!("fundamental tensor signature: ({positive}+, {negative}-)");
    assert_eq!(positive, 2 * n_molecules);
    assert_eq!(negative, (2 * d - 2) * n_molecules);

    // Averaging over the unit hyperboloid removes the direction dependence;
    // the result is the Riemannian target of the cycle flow.
    let sampler = HyperboloidSampler::new(20_000, 42);
    let avg = averaged_metric(&s, &DVector::zeros(dim), &sampler)?;
    println!(
        "averaged metric: {} x {} from {} samples",
        avg.matrix.nrows(),
        avg.matrix.ncols(),
        avg.samples_used
    );
    let sym_defect = (&avg.matrix - avg.matrix.transpose()).norm();
    println!("averaged metric symmetry defect: {sym_defect:.3e}");
    Ok(())
}
