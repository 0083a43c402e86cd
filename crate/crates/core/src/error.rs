use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("cannot condition on an outcome of probability {probability:e}")]
    NullOutcome { probability: f64 },

    #[error("questions {first} and {second} are not exclusive (overlap {overlap:e})")]
    NotExclusive {
        first: usize,
        second: usize,
        overlap: f64,
    },

    #[error("invalid classical strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("setting {setting} recorded no detection events")]
    EmptySetting { setting: String },

    #[error("device internal settings did not converge (best fidelity {fidelity})")]
    DeviceConfiguration { fidelity: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
