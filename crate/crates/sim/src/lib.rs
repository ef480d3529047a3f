//! Radar tracking scenarios for comparing the IMM and hybrid IMM filters:
//! truth generation, measurement simulation and conversion, track
//! initialization, and seeded Monte Carlo evaluation.

pub mod init;
pub mod metrics;
pub mod monte_carlo;
pub mod radar;
pub mod scenario;
pub mod truth;

pub use monte_carlo::{run_monte_carlo, Method, MethodResults, MonteCarloReport, TrackerSettings};
pub use scenario::{ExperimentGroup, GroupParameters, NoiseParameters, Phase, ScenarioConfig, SensorAccuracy};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("target at the sensor origin has undefined bearing")]
    TargetAtOrigin,
    #[error("initialization needs {needed} measurements, got {got}")]
    InsufficientMeasurements { needed: usize, got: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] sigmax_core::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
