//! 1976 U.S. Standard Atmosphere, troposphere layer only (0..11 km).

use crate::error::{SimError, SimResult};

/// Sea-level temperature [K].
const T0: f64 = 288.15;
/// Sea-level pressure [Pa].
const P0: f64 = 101_325.0;
/// Tropospheric lapse rate [K/m].
const LAPSE: f64 = 0.0065;
/// Specific gas constant for dry air [J/(kg K)].
const R_AIR: f64 = 287.0528;
/// Ratio of specific heats.
const GAMMA: f64 = 1.4;
/// Standard gravity [m/s^2].
const G0: f64 = 9.80665;
/// Top of the modeled layer [m].
const H_MAX: f64 = 11_000.0;

/// Static air properties plus the flight-condition quantities derived
/// from airspeed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereSample {
    /// Air density [kg/m^3].
    pub density: f64,
    /// Speed of sound [m/s].
    pub speed_of_sound: f64,
    /// Dynamic pressure 1/2 rho V^2 [Pa].
    pub dynamic_pressure: f64,
    /// Mach number.
    pub mach: f64,
}

/// Evaluate the standard atmosphere at `altitude_m` and combine with
/// airspeed `speed` to get dynamic pressure and Mach number.
pub fn atmosphere(altitude_m: f64, speed: f64) -> SimResult<AtmosphereSample> {
    if !(0.0..=H_MAX).contains(&altitude_m) {
        return Err(SimError::OutOfEnvelope {
            quantity: "altitude [m]",
            value: altitude_m,
            min: 0.0,
            max: H_MAX,
        });
    }
    debug_assert!(speed >= 0.0, "airspeed must be non-negative");

    let temp = T0 - LAPSE * altitude_m;
    let pressure = P0 * (temp / T0).powf(G0 / (R_AIR * LAPSE));
    let density = pressure / (R_AIR * temp);
    let speed_of_sound = (GAMMA * R_AIR * temp).sqrt();

    Ok(AtmosphereSample {
        density,
        speed_of_sound,
        dynamic_pressure: 0.5 * density * speed * speed,
        mach: speed / speed_of_sound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_speed_gives_zero_q_and_mach() {
        let s = atmosphere(0.0, 0.0).unwrap();
        assert_eq!(s.dynamic_pressure, 0.0);
        assert_eq!(s.mach, 0.0);
        // sea-level density sanity
        assert!((s.density - 1.225).abs() < 1e-3);
    }

    #[test]
    fn density_at_2000m_matches_hand_evaluation() {
        // Independent evaluation of the layer formula with literal constants:
        // T = 288.15 - 0.0065*2000, p = 101325*(T/288.15)^(g0/(R*L)),
        // rho = p/(R*T).
        let t: f64 = 288.15 - 0.0065 * 2000.0;
        let p = 101_325.0 * (t / 288.15).powf(9.80665 / (287.0528 * 0.0065));
        let rho = p / (287.0528 * t);
        assert!((rho - 1.00649).abs() < 1e-4, "oracle rho = {rho}");

        let s = atmosphere(2000.0, 250.0).unwrap();
        assert!((s.density - rho).abs() < 1e-12);
        assert!((s.dynamic_pressure - 0.5 * rho * 250.0 * 250.0).abs() < 1e-9);
    }

    #[test]
    fn mach_one_at_local_speed_of_sound() {
        let a = atmosphere(2000.0, 0.0).unwrap().speed_of_sound;
        let s = atmosphere(2000.0, a).unwrap();
        assert!((s.mach - 1.0).abs() < 1e-15);
        assert!((a - 332.53).abs() < 0.01);
    }

    #[test]
    fn altitude_outside_layer_is_rejected() {
        assert!(matches!(
            atmosphere(-1.0, 10.0),
            Err(SimError::OutOfEnvelope { .. })
        ));
        assert!(matches!(
            atmosphere(12_000.0, 10.0),
            Err(SimError::OutOfEnvelope { .. })
        ));
    }
}
