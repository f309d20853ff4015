//! Second-order fin servo with rate and position saturation.

use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};

/// Servo parameters. Defaults: 180 rad/s natural frequency, 0.7 damping,
/// +/-30 deg travel, +/-450 deg/s slew.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorParams {
    /// Natural frequency [rad/s].
    pub natural_freq: f64,
    /// Damping ratio.
    pub damping: f64,
    /// Position limit [rad].
    pub position_limit: f64,
    /// Rate limit [rad/s].
    pub rate_limit: f64,
}

impl Default for ActuatorParams {
    fn default() -> Self {
        Self {
            natural_freq: 180.0,
            damping: 0.7,
            position_limit: 30.0_f64.to_radians(),
            rate_limit: 450.0_f64.to_radians(),
        }
    }
}

impl ActuatorParams {
    pub fn validate(&self) -> SimResult<()> {
        if self.natural_freq <= 0.0
            || self.damping <= 0.0
            || self.position_limit <= 0.0
            || self.rate_limit <= 0.0
        {
            return Err(SimError::Config(
                "actuator parameters must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Fin position and rate [rad, rad/s].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorState {
    pub position: f64,
    pub rate: f64,
}

/// Advance the servo one step with the command held over `dt`.
///
/// The dynamics `dd = w^2 (cmd - d) - 2 z w d_dot` integrate with
/// classical RK4. The slew limit is embedded in the position slope
/// during integration (the motor cannot move the surface faster than the
/// rate limit at any instant, not merely at sample times), so the fin
/// can never travel more than `rate_limit * dt` in one step. The clamps
/// then apply in a fixed order: rate first, then position, zeroing the
/// rate when the fin is pinned against the stop. The ordering keeps the
/// state from winding up inside the stop and makes identical input
/// sequences produce identical outputs.
pub fn actuator_step(
    params: &ActuatorParams,
    state: &ActuatorState,
    command: f64,
    dt: f64,
) -> ActuatorState {
    debug_assert!(dt > 0.0);
    let rl = params.rate_limit;
    let w2 = params.natural_freq * params.natural_freq;
    let two_zw = 2.0 * params.damping * params.natural_freq;
    let slew = |rate: f64| rate.clamp(-rl, rl);
    let accel = |pos: f64, rate: f64| w2 * (command - pos) - two_zw * slew(rate);

    let (p0, r0) = (state.position, state.rate);
    let (k1p, k1r) = (slew(r0), accel(p0, r0));
    let (k2p, k2r) = (
        slew(r0 + 0.5 * dt * k1r),
        accel(p0 + 0.5 * dt * k1p, r0 + 0.5 * dt * k1r),
    );
    let (k3p, k3r) = (
        slew(r0 + 0.5 * dt * k2r),
        accel(p0 + 0.5 * dt * k2p, r0 + 0.5 * dt * k2r),
    );
    let (k4p, k4r) = (
        slew(r0 + dt * k3r),
        accel(p0 + dt * k3p, r0 + dt * k3r),
    );

    let mut position = p0 + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    let mut rate = r0 + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);

    rate = rate.clamp(-rl, rl);
    if position >= params.position_limit {
        position = params.position_limit;
        rate = rate.min(0.0);
    } else if position <= -params.position_limit {
        position = -params.position_limit;
        rate = rate.max(0.0);
    }

    ActuatorState { position, rate }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_stays_at_rest() {
        let p = ActuatorParams::default();
        let mut s = ActuatorState::default();
        for _ in 0..100 {
            s = actuator_step(&p, &s, 0.0, 1e-3);
        }
        assert_eq!(s.position, 0.0);
        assert_eq!(s.rate, 0.0);
    }

    #[test]
    fn large_command_settles_at_position_limit() {
        let p = ActuatorParams::default();
        let mut s = ActuatorState::default();
        let cmd = 60.0_f64.to_radians();
        for _ in 0..2000 {
            s = actuator_step(&p, &s, cmd, 1e-3);
        }
        assert!((s.position - p.position_limit).abs() < 1e-9);
        assert!((s.position.to_degrees() - 30.0).abs() < 1e-7);
    }

    #[test]
    fn limits_hold_for_any_step() {
        let p = ActuatorParams::default();
        let mut s = ActuatorState::default();
        // aggressive alternating commands
        for i in 0..5000 {
            let cmd = if (i / 37) % 2 == 0 { 2.0 } else { -2.0 };
            s = actuator_step(&p, &s, cmd, 1e-3);
            assert!(s.position.abs() <= p.position_limit);
            assert!(s.rate.abs() <= p.rate_limit);
        }
    }

    #[test]
    fn small_step_settling_matches_closed_form() {
        // 2% settling of the continuous underdamped response, computed
        // here from the closed form, against the simulated servo.
        let p = ActuatorParams::default();
        let (w, z) = (p.natural_freq, p.damping);
        let wd = w * (1.0 - z * z).sqrt();
        let step = 5.0_f64.to_radians();
        let response = |t: f64| {
            let phase = (1.0 - z * z).sqrt().atan2(z);
            step * (1.0
                - (-(z * w * t)).exp() / (1.0 - z * z).sqrt() * (wd * t + phase).sin())
        };
        let fine = 1e-6;
        let mut t_settle_oracle = 0.0;
        let mut t = 0.0;
        while t < 0.2 {
            if (response(t) - step).abs() > 0.02 * step {
                t_settle_oracle = t;
            }
            t += fine;
        }

        let dt = 1e-5;
        let mut s = ActuatorState::default();
        let mut t_settle_sim = 0.0;
        let mut time = 0.0;
        while time < 0.2 {
            s = actuator_step(&p, &s, step, dt);
            time += dt;
            if (s.position - step).abs() > 0.02 * step {
                t_settle_sim = time;
            }
        }

        let envelope_estimate = 4.0 / (z * w);
        assert!(
            (t_settle_sim - t_settle_oracle).abs() <= 0.02 * t_settle_oracle,
            "sim {t_settle_sim} vs oracle {t_settle_oracle}"
        );
        assert!(
            (t_settle_sim - envelope_estimate).abs() <= 0.10 * envelope_estimate,
            "sim {t_settle_sim} vs 4/(zw) {envelope_estimate}"
        );
    }

    #[test]
    fn unsaturated_response_converges_with_dt() {
        // with limits effectively off, halving dt must shrink the error
        // against a fine-step reference by at least 4x
        let p = ActuatorParams {
            position_limit: 1e9,
            rate_limit: 1e9,
            ..Default::default()
        };
        let run = |dt: f64| {
            let mut s = ActuatorState { position: 0.3, rate: -2.0 };
            let steps = (0.05 / dt).round() as usize;
            for _ in 0..steps {
                s = actuator_step(&p, &s, 0.1, dt);
            }
            s.position
        };
        let reference = run(1e-6);
        let e1 = (run(2e-3) - reference).abs();
        let e2 = (run(1e-3) - reference).abs();
        assert!(
            e1 / e2 > 4.0,
            "error ratio {} (e1={e1}, e2={e2})",
            e1 / e2
        );
    }

    #[test]
    fn pinned_fin_releases_cleanly() {
        let p = ActuatorParams::default();
        let mut s = ActuatorState::default();
        for _ in 0..1000 {
            s = actuator_step(&p, &s, 1.0, 1e-3);
        }
        assert_eq!(s.position, p.position_limit);
        assert!(s.rate <= 0.0);
        // command reversal pulls it off the stop
        for _ in 0..200 {
            s = actuator_step(&p, &s, -1.0, 1e-3);
        }
        assert!(s.position < p.position_limit);
    }
}
