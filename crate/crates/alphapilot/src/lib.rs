//! Pitch-plane missile flight dynamics with an adaptive nonlinear
//! backstepping angle-of-attack autopilot.
//!
//! The crate simulates a boosting airframe in the maneuver plane,
//! controlled by a backstepping autopilot whose lumped model errors are
//! estimated on line with a time-delay scheme and cancelled in the
//! control law. A cascaded PI outer loop converts normal-acceleration
//! commands into alpha commands, with smooth command blending at the end
//! of a high-incidence turn.
//!
//! Layout:
//! * [`atmosphere`], [`tables`], [`airframe`] — the truth plant.
//! * [`feedback_form`] — the cascade decomposition and the exact
//!   bookkeeping of what the controller's model does not know.
//! * [`controller`], [`actuator`] — the autopilot and the fin servo.
//! * [`scenario`], [`profile`], [`sim`], [`telemetry`], [`metrics`] —
//!   config-driven closed-loop runs with CSV telemetry.

pub mod actuator;
pub mod airframe;
pub mod atmosphere;
pub mod controller;
pub mod error;
pub mod feedback_form;
pub mod metrics;
pub mod profile;
pub mod scenario;
pub mod sim;
pub mod tables;
pub mod telemetry;

pub use error::{SimError, SimResult};
pub use scenario::{Scenario, ScenarioConfig};
pub use sim::{compare_adaptation, run_scenario, RunOutcome};
