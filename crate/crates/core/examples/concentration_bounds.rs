//! Concentration of measure in high dimension: a 1-Lipschitz observable of
//! a uniform point on a high-dimensional sphere (or of a standard Gaussian
//! vector) hardly ever strays from its median. The empirical tail fractions
//! must sit below the analytic exponential bounds, margin included.

use hamilton_randers::concentration::{
    empirical_concentration, gaussian_function_samples, sphere_function_samples, TailBound,
};

fn print_report(title: &str, report: &hamilton_randers::concentration::ConcentrationReport) {
    println!("{title}");
    println!(
        "  levy mean {:.5}, observable sigma {:.5}, {} samples",
        report.levy_mean, report.sigma_f, report.samples
    );
    println!(
        "  {:>8}  {:>12}  {:>12}  {:>6}",
        "rho", "one-sided", "bound", "pass"
    );
    for (i, rho) in report.rho_grid.iter().enumerate() {
        println!(
            "  {rho:>8.3}  {:>12.3e}  {:>12.3e}  {:>6}",
            report.alpha_empirical[i], report.bound[i], report.pass[i]
        );
    }
}

fn main() -> hamilton_randers::Result<()> {
    // First coordinate of a uniform point on S^49 in R^50.
    let sphere_dim = 49;
    let samples = sphere_function_samples(sphere_dim, 40_000, 2024, |x| x[0]);
    let sphere = empirical_concentration(
        &samples,
        &[0.1, 0.2, 0.3],
        &TailBound::Sphere { ambient_dim: sphere_dim + 1 },
    )?;
    print_report("uniform sphere S^49, f = x1:", &sphere);
    assert!(sphere.all_pass());

    // Euclidean norm deviation of a 200-dimensional standard Gaussian, a
    // 1-Lipschitz function concentrating at the scale rho_p = 1.
    let dim = 200;
    let values = gaussian_function_samples(dim, 40_000, 2025, |x| x.norm());
    let gauss = empirical_concentration(&values, &[1.0, 2.0], &TailBound::Gaussian { rho_p: 1.0 })?;
    print_report("standard gaussian in R^200, f = |x|:", &gauss);
    assert!(gauss.all_pass());

    // The ensemble-scale bound shows why localization sharpens so fast with
    // molecule count: the exponent grows like N^2.
    println!("ensemble-scale tail bound at rho = 1:");
    for n in [1usize, 10, 100] {
        let b = TailBound::HrScale { n_molecules: n };
        println!("  N = {n:>4}: {:.3e}", b.bound(1.0)?);
    }
    Ok(())
}
