//! Fixed-step closed-loop simulation engine.
//!
//! Plant, actuator, and controller share one clock. Each step: evaluate
//! the flight condition and the uncertainty bookkeeping at time t, log a
//! telemetry record, step the controller, advance the plant over
//! [t, t+dt] with the achieved fin held constant, then advance the
//! actuator with the new fin command. Runs abort (with partial telemetry)
//! when the state leaves the aero-table envelope, the fin loses moment
//! effectiveness, or a derivative stops being finite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::actuator::{actuator_step, ActuatorState};
use crate::airframe::{equations_of_motion, LongitudinalState, StateDerivative};
use crate::atmosphere::atmosphere;
use crate::controller::{CommandInput, Controller, Measurements, ModelTerms};
use crate::error::{SimError, SimResult};
use crate::feedback_form::{
    nominal_terms, truth_terms, truth_uncertainties, FlightPoint, ModelEval,
};
use crate::metrics::{compute_metrics, Metrics, MetricsAux};
use crate::scenario::{CommandSource, Scenario};
use crate::telemetry::TelemetryRecord;

/// Classical 4th-order Runge-Kutta advance of a fixed-size state vector.
/// The derivative is checked for finiteness at every stage.
pub fn rk4_step<const N: usize>(
    t: f64,
    state: &[f64; N],
    dt: f64,
    deriv: &mut dyn FnMut(f64, &[f64; N]) -> SimResult<[f64; N]>,
) -> SimResult<[f64; N]> {
    debug_assert!(dt > 0.0);
    let mut eval = |tt: f64, x: &[f64; N]| -> SimResult<[f64; N]> {
        let d = deriv(tt, x)?;
        if d.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Diverged { t: tt, channel: "state derivative" });
        }
        Ok(d)
    };

    let k1 = eval(t, state)?;
    let mut x2 = *state;
    for i in 0..N {
        x2[i] += 0.5 * dt * k1[i];
    }
    let k2 = eval(t + 0.5 * dt, &x2)?;
    let mut x3 = *state;
    for i in 0..N {
        x3[i] += 0.5 * dt * k2[i];
    }
    let k3 = eval(t + 0.5 * dt, &x3)?;
    let mut x4 = *state;
    for i in 0..N {
        x4[i] += dt * k3[i];
    }
    let k4 = eval(t + dt, &x4)?;

    let mut out = *state;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Truth plant
// ---------------------------------------------------------------------------

/// The simulated truth: nominal buildup perturbed by the uncertainty
/// configuration.
pub struct TruthPlant<'a> {
    pub scenario: &'a Scenario,
}

impl TruthPlant<'_> {
    /// Plant derivative at a given state and held fin deflection.
    pub fn derivative(
        &self,
        state: &LongitudinalState,
        fin: f64,
    ) -> SimResult<StateDerivative> {
        let sc = self.scenario;
        let speed = state.speed();
        if speed <= 0.0 {
            return Err(SimError::SingularFlightCondition { t: state.t });
        }
        let alpha = state.alpha();
        let atmos = atmosphere(sc.altitude, speed)?;
        let mass = sc.airframe.boost.at(state.t);
        let nominal =
            sc.airframe
                .aero
                .coefficients(alpha, atmos.mach, fin, state.q, speed, &mass)?;
        let truth = sc.uncertainty.perturb(&nominal);
        let (fx, fz, my) =
            crate::airframe::forces_moments(&truth, atmos.dynamic_pressure, &sc.airframe.aero);
        let mut d = equations_of_motion(state, fx, fz, my, &mass);

        if !sc.uncertainty.inject_h1 {
            // Remove the fin force's rotation of the velocity vector
            // without touching the speed dynamics: subtracting h1 from
            // alpha_dot is a pure rotation correction.
            let p = FlightPoint { alpha, q: state.q, speed };
            let h1 = ModelEval::perturbed(&sc.airframe.aero, sc.uncertainty.delta_pert)
                .h1(&p, fin, &atmos, &mass)?;
            d.du += state.w * h1;
            d.dw -= state.u * h1;
        }
        Ok(d)
    }
}

fn pack(s: &LongitudinalState) -> [f64; 6] {
    [s.u, s.w, s.q, s.theta, s.pos_x, s.pos_z]
}

fn unpack(x: &[f64; 6], t: f64) -> LongitudinalState {
    LongitudinalState {
        u: x[0],
        w: x[1],
        q: x[2],
        theta: x[3],
        pos_x: x[4],
        pos_z: x[5],
        t,
    }
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

/// Result of a scenario run. An abort leaves the telemetry gathered so
/// far in place together with the reason.
#[derive(Debug)]
pub struct RunOutcome {
    pub telemetry: Vec<TelemetryRecord>,
    pub metrics: Option<Metrics>,
    pub abort: Option<SimError>,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }
}

struct NoiseGen {
    rng: ChaCha8Rng,
    normal: Normal<f64>,
    enabled: bool,
}

impl NoiseGen {
    fn new(seed: u64, enabled: bool) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            normal: Normal::new(0.0, 1.0).expect("unit normal"),
            enabled,
        }
    }

    fn sample(&mut self, sigma: f64) -> f64 {
        if self.enabled && sigma > 0.0 {
            sigma * self.normal.sample(&mut self.rng)
        } else if self.enabled {
            // keep the stream position independent of which sigmas are on
            let _ = self.normal.sample(&mut self.rng);
            0.0
        } else {
            0.0
        }
    }
}

/// Run the closed loop to `t_final` or abort.
pub fn run_scenario(scenario: &Scenario) -> RunOutcome {
    let sc = scenario;
    let dt = sc.dt;
    let n_steps = (sc.t_final / dt).round() as usize;
    let plant = TruthPlant { scenario: sc };
    let mut controller = Controller::new(sc.controller);
    let mut act = ActuatorState::default();
    let mut state = LongitudinalState::from_flight_condition(
        sc.initial_speed,
        sc.initial_alpha,
        sc.initial_pitch_rate,
        0.0,
    );
    let gamma0 = state.flight_path_angle();
    let mut noise = NoiseGen::new(sc.seed, sc.noise.any());

    let mut telemetry = Vec::with_capacity(n_steps + 1);
    let mut aux = MetricsAux::default();
    let mut abort = None;
    let mut heading_swept = 0.0_f64;

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        let step_result = (|| -> SimResult<(TelemetryRecord, f64)> {
            let speed = state.speed();
            if speed <= 0.0 {
                return Err(SimError::SingularFlightCondition { t });
            }
            let alpha = state.alpha();
            let atmos = atmosphere(sc.altitude, speed)?;
            let mass = sc.airframe.boost.at(t);
            let fin = act.position;

            // truth-side bookkeeping
            let point = FlightPoint { alpha, q: state.q, speed };
            let nominal = nominal_terms(&sc.airframe.aero, &point, fin, &atmos, &mass)?;
            let truth =
                truth_terms(&sc.airframe.aero, &point, fin, &atmos, &mass, &sc.uncertainty)?;
            let (d1_true, d2_true) = truth_uncertainties(&nominal, &truth, fin);

            let coeffs_nom =
                sc.airframe
                    .aero
                    .coefficients(alpha, atmos.mach, fin, state.q, speed, &mass)?;
            let coeffs_truth = sc.uncertainty.perturb(&coeffs_nom);
            let accel_normal = atmos.dynamic_pressure * sc.airframe.aero.reference_area
                * coeffs_truth.c_n
                / mass.mass;

            // heading sweep since launch
            heading_swept = heading_swept
                .max((state.flight_path_angle() - gamma0).abs());

            // measurements (optionally noisy); the truth state is not
            // touched
            let meas_alpha = alpha + noise.sample(sc.noise.sigma_alpha);
            let meas_q = state.q + noise.sample(sc.noise.sigma_pitch_rate);
            let meas_speed = (speed + noise.sample(sc.noise.sigma_speed)).max(1.0);
            let meas_accel = accel_normal + noise.sample(sc.noise.sigma_accel);
            let meas = Measurements {
                t,
                alpha: meas_alpha,
                q: meas_q,
                fin,
                accel_normal: meas_accel,
            };

            // nominal model terms at the measured condition
            let meas_atmos = atmosphere(sc.altitude, meas_speed)?;
            let meas_point = FlightPoint { alpha: meas_alpha, q: meas_q, speed: meas_speed };
            let eval = ModelEval::nominal(&sc.airframe.aero);
            let terms = ModelTerms {
                f1: eval.f1(&meas_point, &meas_atmos, &mass)?,
                f2: eval.f2(&meas_point, &meas_atmos, &mass)?,
                h2: eval.h2(&meas_point, &meas_atmos, &mass)?,
            };

            // command resolution and turn-exit handover
            let cmd = match &sc.command {
                CommandSource::AlphaStep { magnitude, time } => CommandInput::Alpha(if t >= *time {
                    *magnitude
                } else {
                    sc.initial_alpha
                }),
                CommandSource::AlphaProfile(profile) => {
                    CommandInput::Alpha(profile.command(t))
                }
                CommandSource::AccelStep { magnitude, time, ramp } => {
                    CommandInput::Acceleration(CommandSource::accel_command(
                        *magnitude, *time, *ramp, t,
                    ))
                }
                CommandSource::TurnThenAccel { profile, accel } => {
                    if !controller.blend_active()
                        && heading_swept >= sc.heading_reversal
                        && meas_alpha.abs() <= sc.turn_exit_alpha
                    {
                        controller.trigger_blend(&meas, *accel);
                    }
                    CommandInput::AlphaThenAcceleration {
                        alpha: profile.command(t),
                        accel: *accel,
                    }
                }
            };

            let out = controller.step(&meas, &terms, &cmd, dt);

            if aux.heading_reversal_time_s.is_none() && heading_swept >= sc.heading_reversal {
                aux.heading_reversal_time_s = Some(t);
            }

            let record = TelemetryRecord {
                t,
                u: state.u,
                w: state.w,
                q: state.q,
                alpha,
                speed,
                mach: atmos.mach,
                dynamic_pressure: atmos.dynamic_pressure,
                alpha_cmd_raw: out.alpha_cmd_raw,
                alpha_cmd_shaped: out.alpha_cmd_shaped,
                z1: out.z1,
                z2: out.z2,
                delta1_true: d1_true,
                delta2_true: d2_true,
                delta1_hat: out.delta1_hat,
                delta2_hat: out.delta2_hat,
                x2d: out.x2d,
                fin_cmd: out.fin_cmd,
                fin,
                accel_normal,
                lambda: out.lambda,
            };
            Ok((record, out.fin_cmd))
        })();

        let (record, fin_cmd) = match step_result {
            Ok(r) => r,
            Err(e) => {
                abort = Some(e);
                break;
            }
        };
        telemetry.push(record);
        aux.peak_fin_rate_rads = aux.peak_fin_rate_rads.max(act.rate.abs());

        if k == n_steps {
            break;
        }

        // advance plant with the fin held over the step
        let fin_now = act.position;
        let mut deriv = |tt: f64, x: &[f64; 6]| -> SimResult<[f64; 6]> {
            let s = unpack(x, tt);
            let d = plant.derivative(&s, fin_now)?;
            Ok([d.du, d.dw, d.dq, d.dtheta, d.dpos_x, d.dpos_z])
        };
        match rk4_step(t, &pack(&state), dt, &mut deriv) {
            Ok(next) => {
                state = unpack(&next, (k + 1) as f64 * dt);
                if !next.iter().all(|v| v.is_finite()) {
                    abort = Some(SimError::Diverged { t, channel: "plant state" });
                    break;
                }
            }
            Err(e) => {
                abort = Some(e);
                break;
            }
        }

        act = actuator_step(&sc.actuator, &act, fin_cmd, dt);
        aux.peak_fin_rate_rads = aux.peak_fin_rate_rads.max(act.rate.abs());
    }

    let metrics = if telemetry.is_empty() {
        None
    } else {
        Some(compute_metrics(&telemetry, &aux))
    };
    RunOutcome { telemetry, metrics, abort }
}

/// Paired run with the time-delay adaptation off and on; everything else
/// identical.
pub struct AdaptationComparison {
    pub off: RunOutcome,
    pub on: RunOutcome,
}

pub fn compare_adaptation(scenario: &Scenario) -> AdaptationComparison {
    let mut off = scenario.clone();
    off.controller.adaptation = false;
    let mut on = scenario.clone();
    on.controller.adaptation = true;
    AdaptationComparison { off: run_scenario(&off), on: run_scenario(&on) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_preserves_fixed_points() {
        let mut zero = |_: f64, _: &[f64; 3]| Ok([0.0; 3]);
        let x = [1.0, -2.0, 3.5];
        let out = rk4_step(0.0, &x, 0.1, &mut zero).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn rk4_scalar_growth_matches_fourth_order_taylor() {
        // x' = -x over one step of 0.1: the RK4 growth factor equals the
        // 4th-order Taylor polynomial of exp(-0.1) exactly
        let mut f = |_: f64, x: &[f64; 1]| Ok([-x[0]]);
        let out = rk4_step(0.0, &[1.0], 0.1, &mut f).unwrap();
        let h = -0.1_f64;
        let taylor = 1.0 + h + h * h / 2.0 + h * h * h / 6.0 + h * h * h * h / 24.0;
        assert!((out[0] - taylor).abs() < 1e-15);
        assert!((out[0] - (-0.1_f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rk4_rejects_non_finite_derivatives() {
        let mut f = |_: f64, _: &[f64; 1]| Ok([f64::NAN]);
        assert!(matches!(
            rk4_step(0.0, &[1.0], 0.1, &mut f),
            Err(SimError::Diverged { .. })
        ));
    }
}
