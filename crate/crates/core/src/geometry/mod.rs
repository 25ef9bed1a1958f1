//! Phase-space geometry: Lorentz metrics and their Sasaki lifts, Randers
//! structures with drift fields, the timelike cone, hyperboloid-averaged
//! metrics, and observer-adapted distances.

mod average;
mod lorentz;
mod randers;

pub use average::{
    averaged_metric, averaged_metric_from_samples, sample_unit_shell, AveragedMetric,
    HyperboloidSampler,
};
pub use lorentz::{
    distance_to_worldline, observer_metric, sasaki_block_metric, LorentzMetric, ObserverFrame,
    ObserverMetric,
};
pub use randers::{
    cone_contains, fundamental_tensor, hr_value, hr_value_squared, BetaField, PhasePoint,
    RandersStructure, HESSIAN_REL_STEP,
};
