use thiserror::Error;

/// Crate-wide error type. Variants are grouped loosely by the layer that
/// raises them; the payload carries enough context to act on the failure.
#[derive(Error, Debug)]
pub enum Error {
    // geometry
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("metric signature must be (+,-,...,-): {0}")]
    Signature(String),
    #[error("matrix is singular or nearly singular: {0}")]
    Singular(String),
    #[error("momentum outside the closed timelike cone (quadratic form {qform:.6e})")]
    ConeDomain { qform: f64 },
    #[error("fundamental tensor singular at the cone boundary (quadratic form {qform:.6e})")]
    ConeSingularity { qform: f64 },
    #[error("hyperboloid sampler failed: {0}")]
    Sampling(String),
    #[error("observer frame must be timelike: eta(W,W) = {norm:.6e}")]
    Frame { norm: f64 },
    #[error("world line has no sample points")]
    EmptyWorldline,

    // flow / dynamics
    #[error("internal time {t} outside the schedule domain [0, {semi_period}]")]
    ScheduleDomain { t: f64, semi_period: f64 },
    #[error("slow-time reparameterization singular at kappa = 1 (t = {t})")]
    Reparameterization { t: f64 },
    #[error("trajectory diverged at step {step}: |state| = {magnitude:.6e} (last valid state retained)")]
    Divergence { step: usize, magnitude: f64, last_valid: Vec<f64> },
    #[error("kinematic domain violation: {0}")]
    Kinematics(String),

    // ensemble
    #[error("{count} molecule positions fall outside the density grid (first ids: {first_ids:?})")]
    Coverage { count: usize, first_ids: Vec<usize> },
    #[error("negative density value {value:.6e} in cell {cell}")]
    DataCorruption { cell: usize, value: f64 },
    #[error("setup error: {0}")]
    Setup(String),

    // shared numeric contracts
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not supported: {0}")]
    Capability(String),

    // experiments / io
    #[error("configuration invalid: {path}: {message}")]
    Config { path: String, message: String },
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("failed to parse configuration: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
