//! Concentration suite: empirical deviation fractions of the standard
//! high-dimensional observables against their closed-form tail bounds, plus
//! the tabulated system-scale bound.

use serde::Serialize;

use crate::concentration::{
    empirical_concentration, gaussian_function_samples, sphere_function_samples,
    ConcentrationReport, TailBound,
};
use crate::error::Result;

use super::config::SuiteBlock;
use super::writers::{ArtifactSet, Cell};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub samples: usize,
    pub sphere_dim: usize,
    pub sphere_all_pass: bool,
    pub gaussian_dim: usize,
    pub gaussian_all_pass: bool,
    pub notes: Vec<String>,
}

fn report_rows(report: &ConcentrationReport) -> Vec<Vec<Cell>> {
    (0..report.rho_grid.len())
        .map(|i| {
            vec![
                Cell::from(report.rho_grid[i]),
                Cell::from(report.deviation_fraction[i]),
                Cell::from(report.alpha_empirical[i]),
                Cell::from(report.bound[i]),
                Cell::from(report.margin[i]),
                Cell::from(report.pass[i]),
            ]
        })
        .collect()
}

const REPORT_COLUMNS: [&str; 6] = ["rho", "fraction", "alpha", "bound", "margin", "pass"];

pub fn run(params: &SuiteBlock, seed: u64, artifacts: &mut ArtifactSet) -> Result<SuiteSummary> {
    let sphere_values =
        sphere_function_samples(params.sphere_dim, params.samples, seed, |x| x[0]);
    let sphere_bound = TailBound::Sphere { ambient_dim: params.sphere_dim + 1 };
    let sphere = empirical_concentration(&sphere_values, &params.sphere_rhos, &sphere_bound)?;
    artifacts.write_table("sphere", &REPORT_COLUMNS, &report_rows(&sphere))?;

    let gaussian_values = gaussian_function_samples(
        params.gaussian_dim,
        params.samples,
        seed.wrapping_add(1),
        |x| x[0],
    );
    let rho_grid: Vec<f64> = params.gaussian_rhos.iter().map(|r| r * params.rho_p).collect();
    let gaussian_bound = TailBound::Gaussian { rho_p: params.rho_p };
    let gaussian = empirical_concentration(&gaussian_values, &rho_grid, &gaussian_bound)?;
    artifacts.write_table("gaussian", &REPORT_COLUMNS, &report_rows(&gaussian))?;

    let hr_rows: Vec<Vec<Cell>> = params
        .hr_sizes
        .iter()
        .map(|&n| {
            let bound = TailBound::HrScale { n_molecules: n }.bound(1.0)?;
            Ok(vec![Cell::from(n), Cell::from(1.0), Cell::from(bound)])
        })
        .collect::<Result<_>>()?;
    artifacts.write_table("hr_bounds", &["n_molecules", "rho", "bound"], &hr_rows)?;

    let mut notes = sphere.notes.clone();
    notes.extend(gaussian.notes.iter().cloned());
    let summary = SuiteSummary {
        samples: params.samples,
        sphere_dim: params.sphere_dim,
        sphere_all_pass: sphere.all_pass(),
        gaussian_dim: params.gaussian_dim,
        gaussian_all_pass: gaussian.all_pass(),
        notes,
    };
    artifacts.write_report("suite_report.json", &summary)?;
    Ok(summary)
}
