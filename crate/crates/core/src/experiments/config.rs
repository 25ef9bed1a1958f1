//! Run configuration: one TOML file per scenario invocation.
//!
//! Parsing and validation are separate stages so error messages can point at
//! the failing field (`ensemble.seed`) rather than a serde type path. Every
//! block is optional at parse time; `validate` enforces the blocks a given
//! scenario needs.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{KinematicLimits, DEFAULT_DRIFT_FACTOR};
use crate::ensemble::{CycleConfig, GridSpec, JitterLaw, MoleculeEnsemble};
use crate::error::{Error, Result};
use crate::flow::{KappaProfile, KappaSchedule};
use crate::geometry::BetaField;
use crate::Result as CrateResult;

use super::writers::OutputFormat;

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collapse: Option<CollapseBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wep: Option<WepBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub double_slit: Option<DoubleSlitBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concentration: Option<SuiteBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correspondence: Option<CorrespondenceBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    /// Spacetime dimension of one molecule (positions live in R^d).
    pub d: usize,
    pub n_molecules: usize,
    #[serde(default = "default_metric")]
    pub metric: String,
    /// Per-molecule drift field over the 2d-dimensional tangent block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaField>,
}

fn default_metric() -> String {
    "minkowski".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowBlock {
    pub semi_period: f64,
    #[serde(default = "default_profile")]
    pub profile: KappaProfile,
    /// Contraction rate; defaults to 5 / semi_period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_c: Option<f64>,
}

fn default_profile() -> KappaProfile {
    KappaProfile::Smoothstep
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsBlock {
    /// Requested step size; rounded to a whole number of steps per cycle.
    pub dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_min: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBlock {
    /// Required: runs never draw entropy from the environment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<JitterLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ergodic_fraction: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseBlock {
    pub n_cycles: usize,
    /// Collapse verdict: contracted spread below this many dispersions.
    pub spread_threshold: f64,
    /// Molecule states probed for the metastable residual.
    pub residual_probes: usize,
    /// Molecules written to the trajectory table.
    pub traced_molecules: usize,
}

impl Default for CollapseBlock {
    fn default() -> Self {
        Self { n_cycles: 3, spread_threshold: 0.5, residual_probes: 32, traced_molecules: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WepBlock {
    /// External-time ticks; one fundamental cycle each.
    pub n_taus: usize,
    /// Second-system jitter; defaults to a uniform law with the variance of
    /// the first system's Gaussian.
    pub jitter_b: Option<JitterLaw>,
    pub mass_b: f64,
    /// Translate system B so both initial medians coincide. Disabling it
    /// makes mismatched starts a setup error.
    pub align_medians: bool,
    /// Seeds for the N vs. 2N shrinkage ensemble; 0 skips the check.
    pub shrinkage_seeds: usize,
    /// Rate constant of the reference curve exp(-c2 N^2) drawn alongside
    /// the statistical envelope.
    pub c2: f64,
}

impl Default for WepBlock {
    fn default() -> Self {
        Self {
            n_taus: 10,
            jitter_b: None,
            mass_b: 2.0,
            align_medians: true,
            shrinkage_seeds: 8,
            c2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DoubleSlitBlock {
    pub separation: f64,
    pub slit_width: f64,
    pub screen_distance: f64,
    /// Effective wavenumber of the synthetic phase field.
    pub k_eff: f64,
    /// "point_source" (spherical wavelet per slit) or "constant".
    pub phase: String,
    /// "both", "a_only", or "b_only".
    pub slits: String,
    /// Per-step transverse jitter of the transport run.
    pub jitter_sigma: f64,
    /// Snapshot cadence of the two-time alternation run.
    pub marginal_every: usize,
}

impl Default for DoubleSlitBlock {
    fn default() -> Self {
        Self {
            separation: 1.0,
            slit_width: 0.15,
            screen_distance: 2.0,
            k_eff: 30.0,
            phase: "point_source".into(),
            slits: "both".into(),
            jitter_sigma: 0.16,
            marginal_every: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecomposeBlock {
    /// Half-width of the compact box K in every phase coordinate.
    pub half_width: f64,
    pub pairs: usize,
    pub probes: usize,
    /// Candidate attenuation scales, largest certified wins.
    pub scales: Vec<f64>,
    /// Probe masses (kg) and radii (m) for the interaction-strength sweep.
    pub masses: Vec<f64>,
    pub radii: Vec<f64>,
    pub lambda: f64,
}

impl Default for DecomposeBlock {
    fn default() -> Self {
        Self {
            half_width: 1.0,
            pairs: 20_000,
            probes: 10_000,
            scales: vec![8.0, 4.0, 2.0, 1.0, 0.5, 0.25],
            masses: vec![1e-27, 1e-15, 1e-3, 1.0, 1e3],
            radii: vec![1e-12, 1e-9, 1e-3, 1.0],
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteBlock {
    pub samples: usize,
    /// Intrinsic sphere dimension n of S^n.
    pub sphere_dim: usize,
    pub sphere_rhos: Vec<f64>,
    pub gaussian_dim: usize,
    /// Dispersion of the Gaussian observable.
    pub rho_p: f64,
    /// Deviation grid in units of rho_p.
    pub gaussian_rhos: Vec<f64>,
    /// Ensemble sizes tabulated for the subquantum-scale bound.
    pub hr_sizes: Vec<usize>,
}

impl Default for SuiteBlock {
    fn default() -> Self {
        Self {
            samples: 100_000,
            sphere_dim: 99,
            sphere_rhos: vec![0.1, 0.2, 0.3],
            gaussian_dim: 1000,
            rho_p: 1.0,
            gaussian_rhos: vec![1.0, 2.0, 3.0],
            hr_sizes: vec![1, 10, 100, 1000],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrespondenceBlock {
    pub b: f64,
    pub grid_size: usize,
    pub spacing: f64,
    pub dtau: f64,
    pub steps: usize,
    pub packet_sigma: f64,
}

impl Default for CorrespondenceBlock {
    fn default() -> Self {
        Self { b: 0.1, grid_size: 256, spacing: 0.1, dtau: 0.01, steps: 100, packet_sigma: 1.0 }
    }
}

pub const SCENARIOS: &[&str] = &[
    "collapse",
    "wep",
    "double_slit",
    "decompose",
    "concentration_suite",
    "correspondence",
];

impl RunConfig {
    /// Parse TOML text. Syntax and type errors come back with the line and
    /// column reported by the parser.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            path: "<serialize>".into(),
            message: e.to_string(),
        })
    }

    pub fn geometry(&self) -> Result<&GeometryBlock> {
        self.geometry
            .as_ref()
            .ok_or_else(|| config_err("geometry", "block required by this scenario"))
    }

    pub fn flow(&self) -> Result<&FlowBlock> {
        self.flow
            .as_ref()
            .ok_or_else(|| config_err("flow", "block required by this scenario"))
    }

    pub fn dynamics(&self) -> Result<&DynamicsBlock> {
        self.dynamics
            .as_ref()
            .ok_or_else(|| config_err("dynamics", "block required by this scenario"))
    }

    pub fn ensemble(&self) -> Result<&EnsembleBlock> {
        self.ensemble
            .as_ref()
            .ok_or_else(|| config_err("ensemble", "block required by this scenario"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.ensemble()?
            .seed
            .ok_or_else(|| config_err("ensemble.seed", "seed is required; runs never draw entropy from the environment"))
    }

    /// Per-molecule drift field; zero when the block leaves it out.
    pub fn beta_field(&self) -> Result<BetaField> {
        let geo = self.geometry()?;
        Ok(geo
            .beta
            .clone()
            .unwrap_or_else(|| BetaField::zero(2 * geo.d)))
    }

    pub fn schedule(&self) -> Result<KappaSchedule> {
        let flow = self.flow()?;
        KappaSchedule::new(flow.semi_period, flow.profile)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let block = self
            .ensemble()?
            .grid
            .as_ref()
            .ok_or_else(|| config_err("ensemble.grid", "this scenario needs a density grid"))?;
        GridSpec::new(block.origin.clone(), block.spacing, block.shape.clone())
            .map_err(|e| config_err("ensemble.grid", e.to_string()))
    }

    pub fn limits(&self) -> Result<KinematicLimits> {
        let dyn_block = self.dynamics()?;
        KinematicLimits::new(dyn_block.c_max.unwrap_or(1.0), dyn_block.l_min.unwrap_or(1e-3))
            .map_err(|e| config_err("dynamics", e.to_string()))
    }

    /// Steps per fundamental cycle implied by `dynamics.dt`.
    pub fn steps_per_cycle(&self) -> Result<usize> {
        let dt = self.dynamics()?.dt;
        let span = 2.0 * self.flow()?.semi_period;
        let steps = (span / dt).round();
        if !(steps >= 1.0) || !steps.is_finite() {
            return Err(config_err(
                "dynamics.dt",
                format!("dt = {dt} does not fit into the cycle span {span}"),
            ));
        }
        Ok(steps as usize)
    }

    pub fn cycle_config(&self) -> CrateResult<CycleConfig> {
        let flow = self.flow()?;
        let dyn_block = self.dynamics()?;
        let ens = self.ensemble()?;
        let schedule = self.schedule()?;
        let lambda_c = flow.lambda_c.unwrap_or(5.0 / flow.semi_period);
        let mut cfg = CycleConfig::defaults(schedule, self.beta_field()?);
        cfg.steps = self.steps_per_cycle()?;
        cfg.lambda_c = lambda_c;
        cfg.drift_factor = dyn_block.drift_factor.unwrap_or(DEFAULT_DRIFT_FACTOR);
        cfg.limits = self.limits()?;
        if let Some(jitter) = ens.jitter {
            cfg.jitter = jitter;
        }
        if let Some(every) = ens.snapshot_every {
            cfg.snapshot_every = every;
        }
        if let Some(fraction) = ens.ergodic_fraction {
            cfg.ergodic_fraction = fraction;
        }
        Ok(cfg)
    }

    /// Gaussian starting cloud per the ensemble block.
    pub fn build_ensemble(&self, seed: u64) -> CrateResult<MoleculeEnsemble> {
        let geo = self.geometry()?;
        let ens = self.ensemble()?;
        let center = ens.center.clone().unwrap_or_else(|| vec![0.0; geo.d]);
        if center.len() != geo.d {
            return Err(config_err(
                "ensemble.center",
                format!("{} coordinates for d = {}", center.len(), geo.d),
            ));
        }
        let sigma0 = ens.sigma0.unwrap_or(0.5);
        let n = geo.n_molecules;
        MoleculeEnsemble::gaussian_cloud(
            n,
            geo.d,
            &center,
            sigma0,
            1.0,
            n as f64,
            self.flow()?.semi_period,
            seed,
        )
    }

    /// Field-path validation of everything the named scenario will touch.
    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(Error::UnknownScenario(self.scenario.clone()));
        }
        // Seed first: it is the one invariant every scenario shares.
        self.seed()?;
        let needs_dynamics = matches!(self.scenario.as_str(), "collapse" | "wep" | "double_slit");
        if needs_dynamics {
            let geo = self.geometry()?;
            if geo.d == 0 {
                return Err(config_err("geometry.d", "dimension must be positive"));
            }
            if geo.n_molecules == 0 {
                return Err(config_err("geometry.n_molecules", "ensemble must be nonempty"));
            }
            if geo.metric != "minkowski" {
                return Err(config_err(
                    "geometry.metric",
                    format!("unsupported metric '{}'; only 'minkowski' is available", geo.metric),
                ));
            }
            self.beta_field()?
                .validate(2 * geo.d)
                .map_err(|e| config_err("geometry.beta", e.to_string()))?;
            let flow = self.flow()?;
            if !(flow.semi_period > 0.0) {
                return Err(config_err("flow.semi_period", "must be positive"));
            }
            if let Some(l) = flow.lambda_c {
                if l < 0.0 {
                    return Err(config_err("flow.lambda_c", "must be nonnegative"));
                }
            }
            let dyn_block = self.dynamics()?;
            if !(dyn_block.dt > 0.0) {
                return Err(config_err("dynamics.dt", "must be positive"));
            }
            self.steps_per_cycle()?;
            self.limits()?;
            let ens = self.ensemble()?;
            if let Some(s) = ens.sigma0 {
                if !(s >= 0.0) {
                    return Err(config_err("ensemble.sigma0", "must be nonnegative"));
                }
            }
            if ens.grid.is_some() {
                let grid = self.grid()?;
                if grid.dim() != geo.d {
                    return Err(config_err(
                        "ensemble.grid",
                        format!("grid dimension {} vs geometry.d = {}", grid.dim(), geo.d),
                    ));
                }
            }
        }
        match self.scenario.as_str() {
            "collapse" => {
                let block = self.collapse.clone().unwrap_or_default();
                if block.n_cycles == 0 {
                    return Err(config_err("collapse.n_cycles", "must be positive"));
                }
                if !(block.spread_threshold > 0.0) {
                    return Err(config_err("collapse.spread_threshold", "must be positive"));
                }
                let sigma0 = self.ensemble()?.sigma0.unwrap_or(0.5);
                if !(sigma0 > 0.0) {
                    return Err(config_err(
                        "ensemble.sigma0",
                        "collapse needs a positive starting dispersion",
                    ));
                }
            }
            "wep" => {
                let block = self.wep.clone().unwrap_or_default();
                if block.n_taus == 0 {
                    return Err(config_err("wep.n_taus", "must be positive"));
                }
                if !(block.mass_b > 0.0) {
                    return Err(config_err("wep.mass_b", "must be positive"));
                }
            }
            "double_slit" => {
                let block = self.double_slit.clone().unwrap_or_default();
                let geo = self.geometry()?;
                if geo.d != 2 {
                    return Err(config_err("geometry.d", "double_slit runs on a planar grid (d = 2)"));
                }
                self.grid()?;
                if !(block.separation > 0.0) {
                    return Err(config_err("double_slit.separation", "must be positive"));
                }
                if !(block.slit_width > 0.0) {
                    return Err(config_err("double_slit.slit_width", "must be positive"));
                }
                if !(block.screen_distance > 0.0) {
                    return Err(config_err("double_slit.screen_distance", "must be positive"));
                }
                if !(block.k_eff > 0.0) {
                    return Err(config_err("double_slit.k_eff", "must be positive"));
                }
                if !matches!(block.phase.as_str(), "point_source" | "constant") {
                    return Err(config_err(
                        "double_slit.phase",
                        format!("unknown phase model '{}'", block.phase),
                    ));
                }
                if !matches!(block.slits.as_str(), "both" | "a_only" | "b_only") {
                    return Err(config_err(
                        "double_slit.slits",
                        format!("unknown slit selection '{}'", block.slits),
                    ));
                }
                if block.marginal_every == 0 {
                    return Err(config_err("double_slit.marginal_every", "must be positive"));
                }
            }
            "decompose" => {
                let geo = self.geometry()?;
                if geo.d == 0 {
                    return Err(config_err("geometry.d", "dimension must be positive"));
                }
                self.beta_field()?
                    .validate(2 * geo.d)
                    .map_err(|e| config_err("geometry.beta", e.to_string()))?;
                let block = self.decompose.clone().unwrap_or_default();
                if !(block.half_width > 0.0) {
                    return Err(config_err("decompose.half_width", "must be positive"));
                }
                if block.scales.is_empty() {
                    return Err(config_err("decompose.scales", "needs at least one candidate"));
                }
                if !(block.lambda > 0.0) {
                    return Err(config_err("decompose.lambda", "must be positive"));
                }
            }
            "concentration_suite" => {
                let block = self.concentration.clone().unwrap_or_default();
                if block.samples == 0 {
                    return Err(config_err("concentration.samples", "must be positive"));
                }
                if block.sphere_dim < 1 {
                    return Err(config_err("concentration.sphere_dim", "sphere dimension must be >= 1"));
                }
                if !(block.rho_p > 0.0) {
                    return Err(config_err("concentration.rho_p", "must be positive"));
                }
            }
            "correspondence" => {
                let block = self.correspondence.clone().unwrap_or_default();
                if !(block.dtau > 0.0) {
                    return Err(config_err("correspondence.dtau", "must be positive"));
                }
                if block.steps == 0 {
                    return Err(config_err("correspondence.steps", "must be positive"));
                }
            }
            _ => unreachable!("scenario list checked above"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COLLAPSE_TOML: &str = r#"
scenario = "collapse"

[geometry]
d = 2
n_molecules = 100

[flow]
semi_period = 1.0

[dynamics]
dt = 0.03125

[ensemble]
seed = 42
sigma0 = 0.5
"#;

    #[test]
    fn minimal_collapse_config_validates() {
        let cfg = RunConfig::parse(COLLAPSE_TOML).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seed().unwrap(), 42);
        assert_eq!(cfg.steps_per_cycle().unwrap(), 64);
        let cycle = cfg.cycle_config().unwrap();
        assert_eq!(cycle.steps, 64);
        assert_eq!(cycle.lambda_c, 5.0);
    }

    #[test]
    fn missing_seed_names_the_field() {
        let text = COLLAPSE_TOML.replace("seed = 42", "");
        let cfg = RunConfig::parse(&text).unwrap();
        let err = cfg.validate().unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "ensemble.seed"),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn parse_error_reports_line_and_column() {
        let err = RunConfig::parse("scenario = \"collapse\"\nbad [[").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line"), "parse error should locate the failure: {text}");
    }

    #[test]
    fn unknown_scenario_is_its_own_error() {
        let text = COLLAPSE_TOML.replace("\"collapse\"", "\"teleport\"");
        let cfg = RunConfig::parse(&text).unwrap();
        match cfg.validate().unwrap_err() {
            Error::UnknownScenario(name) => assert_eq!(name, "teleport"),
            other => panic!("expected unknown scenario, got {other}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("{COLLAPSE_TOML}\n[extra]\nx = 1\n");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn double_slit_requires_planar_geometry_and_grid() {
        let text = r#"
scenario = "double_slit"

[geometry]
d = 3
n_molecules = 10

[flow]
semi_period = 1.0

[dynamics]
dt = 0.03125

[ensemble]
seed = 1
"#;
        let cfg = RunConfig::parse(text).unwrap();
        match cfg.validate().unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "geometry.d"),
            other => panic!("unexpected error {other}"),
        }

        let planar = text.replace("d = 3", "d = 2");
        let cfg = RunConfig::parse(&planar).unwrap();
        match cfg.validate().unwrap_err() {
            Error::Config { path, .. } => assert_eq!(path, "ensemble.grid"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig::parse(COLLAPSE_TOML).unwrap();
        let text = cfg.to_toml().unwrap();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back.scenario, cfg.scenario);
        assert_eq!(back.seed().unwrap(), 42);
        assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn beta_defaults_to_zero_field() {
        let cfg = RunConfig::parse(COLLAPSE_TOML).unwrap();
        let beta = cfg.beta_field().unwrap();
        assert_eq!(beta, BetaField::zero(4));
    }
}
