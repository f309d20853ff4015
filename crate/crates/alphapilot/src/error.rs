//! Error types shared across the simulation crates.

use thiserror::Error;

pub type SimResult<T> = Result<T, SimError>;

/// Everything that can go wrong while building or running a scenario.
#[derive(Debug, Error)]
pub enum SimError {
    /// A lookup left the range covered by the model tables.
    #[error("{quantity} = {value:.6} outside model envelope [{min:.6}, {max:.6}]")]
    OutOfEnvelope {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Airspeed reached zero; the incidence angle is undefined.
    #[error("singular flight condition: airspeed is zero at t = {t:.4} s")]
    SingularFlightCondition { t: f64 },

    /// The fin moment effectiveness dropped below the configured floor.
    #[error("control effectiveness loss: |{value:.4}| below floor {floor:.4}")]
    EffectivenessLoss { value: f64, floor: f64 },

    /// A state or derivative stopped being finite.
    #[error("simulation diverged at t = {t:.4} s: {channel} is not finite")]
    Diverged { t: f64, channel: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("profile parse error at line {line}: {msg}")]
    ProfileParse { line: usize, msg: String },

    #[error("table definition error: {0}")]
    Table(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    /// True for errors that abort a running simulation (as opposed to
    /// configuration errors that prevent it from starting).
    pub fn is_abort(&self) -> bool {
        matches!(
            self,
            SimError::OutOfEnvelope { .. }
                | SimError::SingularFlightCondition { .. }
                | SimError::EffectivenessLoss { .. }
                | SimError::Diverged { .. }
        )
    }
}
