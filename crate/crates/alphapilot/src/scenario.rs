//! Scenario files: a versioned JSON schema describing initial conditions,
//! command source, uncertainty, gains, actuator, and integrator settings,
//! plus the runtime [`Scenario`] assembled from one.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::actuator::ActuatorParams;
use crate::airframe::{default_airframe, Airframe, AirframeFile};
use crate::controller::{BacksteppingGains, ControllerConfig, PiOuterGains, ShapingParams};
use crate::error::{SimError, SimResult};
use crate::feedback_form::UncertaintyConfig;
use crate::profile::AlphaProfile;

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub initial: InitialConfig,
    pub command: CommandConfig,
    #[serde(default)]
    pub airframe: AirframeSelection,
    #[serde(default)]
    pub uncertainty: UncertaintyConfig,
    #[serde(default)]
    pub gains: GainsConfig,
    #[serde(default)]
    pub actuator: ActuatorParams,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub velocity_mps: f64,
    pub altitude_m: f64,
    pub alpha_deg: f64,
    pub pitch_rate_dps: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            velocity_mps: 250.0,
            altitude_m: 2000.0,
            alpha_deg: 0.0,
            pitch_rate_dps: 0.0,
        }
    }
}

/// Where the alpha (or acceleration) command comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CommandConfig {
    /// Step from the initial alpha to `magnitude_deg` at `time_s`.
    AlphaStep {
        magnitude_deg: f64,
        #[serde(default = "default_step_time")]
        time_s: f64,
    },
    /// Track a (t, alpha) profile from a CSV file.
    AlphaProfile { path: String },
    /// Normal-acceleration command through the outer PI loop, ramping
    /// from zero to `magnitude_mps2` over `ramp_s` after `time_s`.
    AccelStep {
        magnitude_mps2: f64,
        #[serde(default = "default_step_time")]
        time_s: f64,
        #[serde(default = "default_accel_ramp")]
        ramp_s: f64,
    },
    /// Alpha profile during the turn, handing over to the acceleration
    /// loop once the turn-exit condition fires.
    TurnThenAccel { profile_path: String, accel_mps2: f64 },
}

fn default_step_time() -> f64 {
    0.1
}

fn default_accel_ramp() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AirframeSelection {
    /// `"default"` selects the shipped synthetic airframe.
    Named(String),
    /// Load an airframe file (path relative to the scenario file).
    Path { path: String },
    /// Inline airframe description.
    Inline(Box<AirframeFile>),
}

impl Default for AirframeSelection {
    fn default() -> Self {
        Self::Named("default".into())
    }
}

/// Controller gains and filter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsConfig {
    pub k1: f64,
    pub k2: f64,
    pub tau_d: f64,
    pub omega_f: f64,
    pub zeta_f: f64,
    pub omega_x2d: f64,
    pub zeta_x2d: f64,
    pub kp: f64,
    pub ki: f64,
    pub alpha_cmd_limit_deg: f64,
    pub blend_duration_s: f64,
    pub turn_exit_alpha_deg: f64,
    pub heading_reversal_deg: f64,
}

impl Default for GainsConfig {
    fn default() -> Self {
        let g = BacksteppingGains::default();
        let s = ShapingParams::default();
        let pi = PiOuterGains::default();
        Self {
            k1: g.k1,
            k2: g.k2,
            tau_d: g.tau_d,
            omega_f: s.natural_freq,
            zeta_f: s.damping,
            omega_x2d: 150.0,
            zeta_x2d: 1.0,
            kp: pi.kp,
            ki: pi.ki,
            alpha_cmd_limit_deg: 50.0,
            blend_duration_s: 0.2,
            turn_exit_alpha_deg: 10.0,
            heading_reversal_deg: 150.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt_s: f64,
    pub t_final_s: f64,
    pub adaptation: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt_s: 1e-3, t_final_s: 5.0, adaptation: true, seed: 0 }
    }
}

/// Measurement noise standard deviations; all default to zero (clean
/// measurements, matching the estimator's design conditions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_alpha_deg: f64,
    pub sigma_pitch_rate_dps: f64,
    pub sigma_speed_mps: f64,
    pub sigma_accel_mps2: f64,
}

impl ScenarioConfig {
    pub fn from_str_json(text: &str) -> SimResult<Self> {
        serde_json::from_str(text)
            .map_err(|e| SimError::Config(format!("scenario parse: {e}")))
    }

    pub fn from_path(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config serializes")
    }

    pub fn validate(&self) -> SimResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SimError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.sim.dt_s > 0.0) {
            return Err(SimError::Config("sim.dt_s must be > 0".into()));
        }
        if !(self.sim.t_final_s > self.sim.dt_s) {
            return Err(SimError::Config("sim.t_final_s must exceed sim.dt_s".into()));
        }
        if !(self.initial.velocity_mps > 0.0) {
            return Err(SimError::Config("initial.velocity_mps must be > 0".into()));
        }
        if self.initial.alpha_deg.abs() > 90.0 {
            return Err(SimError::Config("initial.alpha_deg outside +/-90".into()));
        }
        if !(0.0..=11_000.0).contains(&self.initial.altitude_m) {
            return Err(SimError::Config(
                "initial.altitude_m outside the modeled atmosphere".into(),
            ));
        }
        let g = &self.gains;
        if g.k1 <= 0.0
            || g.k2 <= 0.0
            || g.tau_d <= 0.0
            || g.omega_f <= 0.0
            || g.zeta_f <= 0.0
            || g.omega_x2d <= 0.0
            || g.zeta_x2d <= 0.0
        {
            return Err(SimError::Config(
                "gains k1, k2, tau_d and both shaping filters must be positive".into(),
            ));
        }
        if g.alpha_cmd_limit_deg <= 0.0
            || g.blend_duration_s <= 0.0
            || g.turn_exit_alpha_deg <= 0.0
            || g.heading_reversal_deg <= 0.0
        {
            return Err(SimError::Config(
                "command limits and blend settings must be positive".into(),
            ));
        }
        self.actuator.validate()?;
        self.uncertainty.validate()?;
        match &self.command {
            CommandConfig::AlphaStep { magnitude_deg, time_s } => {
                if magnitude_deg.abs() > 90.0 {
                    return Err(SimError::Config(
                        "alpha_step.magnitude_deg outside +/-90".into(),
                    ));
                }
                if *time_s < 0.0 {
                    return Err(SimError::Config("alpha_step.time_s must be >= 0".into()));
                }
            }
            CommandConfig::AccelStep { time_s, ramp_s, .. } => {
                if *time_s < 0.0 || *ramp_s < 0.0 {
                    return Err(SimError::Config(
                        "accel_step.time_s and ramp_s must be >= 0".into(),
                    ));
                }
            }
            _ => {}
        }
        let n = &self.noise;
        if n.sigma_alpha_deg < 0.0
            || n.sigma_pitch_rate_dps < 0.0
            || n.sigma_speed_mps < 0.0
            || n.sigma_accel_mps2 < 0.0
        {
            return Err(SimError::Config("noise sigmas must be >= 0".into()));
        }
        Ok(())
    }

    /// Assemble the runtime scenario, loading referenced files relative
    /// to `base_dir`.
    pub fn build(&self, base_dir: &Path) -> SimResult<Scenario> {
        self.validate()?;
        let airframe = match &self.airframe {
            AirframeSelection::Named(name) if name == "default" => default_airframe(),
            AirframeSelection::Named(other) => {
                return Err(SimError::Config(format!(
                    "unknown airframe '{other}' (only \"default\" or a path)"
                )));
            }
            AirframeSelection::Path { path } => {
                AirframeFile::from_path(&resolve(base_dir, path))?.into_airframe()?
            }
            AirframeSelection::Inline(file) => file.as_ref().clone().into_airframe()?,
        };

        let command = match &self.command {
            CommandConfig::AlphaStep { magnitude_deg, time_s } => CommandSource::AlphaStep {
                magnitude: magnitude_deg.to_radians(),
                time: *time_s,
            },
            CommandConfig::AlphaProfile { path } => CommandSource::AlphaProfile(
                AlphaProfile::from_path(&resolve(base_dir, path))?,
            ),
            CommandConfig::AccelStep { magnitude_mps2, time_s, ramp_s } => {
                CommandSource::AccelStep {
                    magnitude: *magnitude_mps2,
                    time: *time_s,
                    ramp: *ramp_s,
                }
            }
            CommandConfig::TurnThenAccel { profile_path, accel_mps2 } => {
                CommandSource::TurnThenAccel {
                    profile: AlphaProfile::from_path(&resolve(base_dir, profile_path))?,
                    accel: *accel_mps2,
                }
            }
        };

        let g = &self.gains;
        let controller = ControllerConfig {
            gains: BacksteppingGains { k1: g.k1, k2: g.k2, tau_d: g.tau_d },
            shaping: ShapingParams { natural_freq: g.omega_f, damping: g.zeta_f },
            x2d_shaping: ShapingParams { natural_freq: g.omega_x2d, damping: g.zeta_x2d },
            pi: PiOuterGains { kp: g.kp, ki: g.ki },
            alpha_cmd_limit: g.alpha_cmd_limit_deg.to_radians(),
            blend_duration: g.blend_duration_s,
            adaptation: self.sim.adaptation,
        };
        controller.validate()?;

        Ok(Scenario {
            name: self.name.clone(),
            uncertainty: self.uncertainty.resolved(&airframe.aero),
            airframe,
            command,
            controller,
            actuator: self.actuator,
            initial_speed: self.initial.velocity_mps,
            initial_alpha: self.initial.alpha_deg.to_radians(),
            initial_pitch_rate: self.initial.pitch_rate_dps.to_radians(),
            altitude: self.initial.altitude_m,
            turn_exit_alpha: g.turn_exit_alpha_deg.to_radians(),
            heading_reversal: g.heading_reversal_deg.to_radians(),
            dt: self.sim.dt_s,
            t_final: self.sim.t_final_s,
            seed: self.sim.seed,
            noise: NoiseParams {
                sigma_alpha: self.noise.sigma_alpha_deg.to_radians(),
                sigma_pitch_rate: self.noise.sigma_pitch_rate_dps.to_radians(),
                sigma_speed: self.noise.sigma_speed_mps,
                sigma_accel: self.noise.sigma_accel_mps2,
            },
        })
    }
}

fn resolve(base_dir: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

// ---------------------------------------------------------------------------
// Runtime scenario
// ---------------------------------------------------------------------------

/// Fully resolved command source.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandSource {
    AlphaStep { magnitude: f64, time: f64 },
    AlphaProfile(AlphaProfile),
    AccelStep { magnitude: f64, time: f64, ramp: f64 },
    TurnThenAccel { profile: AlphaProfile, accel: f64 },
}

impl CommandSource {
    /// Commanded normal acceleration for the ramped step source [m/s^2].
    pub fn accel_command(magnitude: f64, time: f64, ramp: f64, t: f64) -> f64 {
        if t < time {
            0.0
        } else if ramp <= 0.0 {
            magnitude
        } else {
            magnitude * ((t - time) / ramp).min(1.0)
        }
    }
}

/// Measurement noise in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseParams {
    pub sigma_alpha: f64,
    pub sigma_pitch_rate: f64,
    pub sigma_speed: f64,
    pub sigma_accel: f64,
}

impl NoiseParams {
    pub fn any(&self) -> bool {
        self.sigma_alpha > 0.0
            || self.sigma_pitch_rate > 0.0
            || self.sigma_speed > 0.0
            || self.sigma_accel > 0.0
    }
}

/// Everything a run needs, with files loaded and units converted.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub airframe: Airframe,
    pub command: CommandSource,
    pub uncertainty: UncertaintyConfig,
    pub controller: ControllerConfig,
    pub actuator: ActuatorParams,
    /// Initial airspeed [m/s].
    pub initial_speed: f64,
    /// Initial angle of attack [rad].
    pub initial_alpha: f64,
    /// Initial pitch rate [rad/s].
    pub initial_pitch_rate: f64,
    /// Constant maneuver altitude [m].
    pub altitude: f64,
    /// Turn-exit alpha threshold for command blending [rad].
    pub turn_exit_alpha: f64,
    /// Heading sweep that counts as a completed reversal [rad].
    pub heading_reversal: f64,
    /// Integrator step [s].
    pub dt: f64,
    /// End time [s].
    pub t_final: f64,
    pub seed: u64,
    pub noise: NoiseParams,
}

impl Scenario {
    /// Plain step scenario on the default airframe; the starting point
    /// for most tests and demos. The command shaper runs at 12 rad/s so
    /// that a full-size step stays within the fin authority of the
    /// default airframe (the 50 rad/s shaping default suits small or
    /// already-smooth commands).
    pub fn default_step(magnitude_deg: f64) -> Self {
        let cfg = ScenarioConfig {
            schema_version: SCHEMA_VERSION,
            name: "step".into(),
            initial: InitialConfig::default(),
            command: CommandConfig::AlphaStep { magnitude_deg, time_s: 0.1 },
            airframe: AirframeSelection::default(),
            uncertainty: UncertaintyConfig::default(),
            gains: GainsConfig { omega_f: 12.0, ..GainsConfig::default() },
            actuator: ActuatorParams::default(),
            sim: SimConfig::default(),
            noise: NoiseConfig::default(),
        };
        cfg.build(Path::new(".")).expect("default step scenario builds")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "schema_version": 1,
            "name": "step20",
            "command": { "type": "alpha_step", "magnitude_deg": 20.0 }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_scenario_parses_with_defaults() {
        let cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        assert_eq!(cfg.sim.dt_s, 1e-3);
        assert_eq!(cfg.initial.velocity_mps, 250.0);
        assert_eq!(cfg.gains.k1, 25.0);
        assert_eq!(cfg.gains.tau_d, 0.02);
        assert_eq!(cfg.gains.kp, 0.0098);
        assert_eq!(cfg.gains.ki, 0.34);
        cfg.validate().unwrap();
        let sc = cfg.build(Path::new(".")).unwrap();
        assert!((sc.initial_speed - 250.0).abs() < 1e-12);
        assert!((sc.altitude - 2000.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_identical() {
        let cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        let json = cfg.to_json_pretty();
        let again = ScenarioConfig::from_str_json(&json).unwrap();
        assert_eq!(cfg, again);
        // and a second cycle for good measure
        assert_eq!(again, ScenarioConfig::from_str_json(&again.to_json_pretty()).unwrap());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        cfg.sim.dt_s = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        cfg.sim.t_final_s = cfg.sim.dt_s / 2.0;
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        cfg.schema_version = 99;
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        cfg.gains.tau_d = -0.1;
        assert!(cfg.validate().is_err());

        // unknown fields are schema errors
        let with_unknown = minimal_json().replace("\"name\"", "\"bogus_field\": 1, \"name\"");
        assert!(ScenarioConfig::from_str_json(&with_unknown).is_err());
    }

    #[test]
    fn worst_case_coupling_resolves_at_build() {
        let mut cfg = ScenarioConfig::from_str_json(&minimal_json()).unwrap();
        cfg.uncertainty.worst_case_coupling = true;
        let sc = cfg.build(Path::new(".")).unwrap();
        assert!(!sc.uncertainty.worst_case_coupling);
        assert!(sc.uncertainty.coupling_cn > 0.0);
        assert!(sc.uncertainty.coupling_cm < 0.0);
        let (cn, cm) = sc.airframe.aero.worst_case_coupling();
        assert_eq!(sc.uncertainty.coupling_cn, cn);
        assert_eq!(sc.uncertainty.coupling_cm, cm);
    }

    #[test]
    fn missing_profile_file_is_an_io_error() {
        let cfg = ScenarioConfig {
            command: CommandConfig::AlphaProfile { path: "does/not/exist.csv".into() },
            ..ScenarioConfig::from_str_json(&minimal_json()).unwrap()
        };
        assert!(matches!(
            cfg.build(Path::new(".")),
            Err(SimError::Io { .. })
        ));
    }
}
