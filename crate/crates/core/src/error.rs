use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid constitutive law: {0}")]
    InvalidLaw(String),

    #[error("loss of hyperbolicity: stress slope {slope} at K*eps = {arg}")]
    HyperbolicityLoss { arg: f64, slope: f64 },

    #[error("stress {sigma} is outside the range of the constitutive law")]
    StressOutOfRange { sigma: f64 },

    #[error("failed to bracket the inverse of the stress law for sigma = {sigma}")]
    BracketFailure { sigma: f64 },

    #[error("period average did not converge to {tol:e} with {points} points")]
    QuadratureNonConvergence { tol: f64, points: usize },

    #[error("degenerate shock: left and right states coincide")]
    DegenerateShock,

    #[error("non-physical jump: [sigma]/[eps] = {ratio} is not positive")]
    NonPhysicalJump { ratio: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("CFL violation: Courant number {courant:.4} exceeds {limit:.4}")]
    CflViolation { courant: f64, limit: f64 },

    #[error("non-finite value in the state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("step limit of {0} reached before t_final")]
    StepLimit(usize),

    #[error("no shock front found in the profile")]
    FrontNotFound,

    #[error("not enough samples for a fit: have {have}, need {need}")]
    InsufficientSamples { have: usize, need: usize },

    #[error("entropy traces do not share probe time {t_probe}")]
    MismatchedProbe { t_probe: f64 },

    #[error("invalid classification input: {0}")]
    InvalidClassification(String),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("sweep list `{0}` is empty")]
    EmptySweep(&'static str),

    #[error("no records to write")]
    NoRecords,

    #[error("malformed snapshot {path}: {reason}")]
    MalformedSnapshot { path: PathBuf, reason: String },

    #[error("malformed records file: {0}")]
    MalformedRecords(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
