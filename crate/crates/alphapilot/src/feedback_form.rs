//! Strict-feedback decomposition of the pitch dynamics.
//!
//! The plant equations split into
//!
//! ```text
//! alpha_dot = f1 + q + h1(fin) + g1
//! q_dot     = f2 + h2 fin      + g2
//! ```
//!
//! with
//!
//! ```text
//! f1 = -(QS/mV) [C_N0 cos a - (C_A0 + C_Aa a + dC_AT) sin a] - T sin a / (mV)
//! f2 =  (QSl/Iyy) [C_M0 + C_Mq q l/(2V) - C_N0 xcgs/l]
//! h1 = -(QS/mV) [C_Nd d cos a - C_Ad (|d|/2)^2 sin a]
//! h2 =  (QSl/Iyy) [C_Md - C_Nd xcgs/l]
//! g1 = -(QS/mV) dC_Nphi cos a,   g2 = (QSl/Iyy) dC_Mphi
//! ```
//!
//! where `xcgs = x_cg_ref - x_cg`. The controller works with the nominal
//! model and neglects `h1` (|h2 fin| dominates |h1| by orders of
//! magnitude on this class of airframe). The truth plant may carry
//! multiplicative coefficient uncertainty and additive roll-coupling
//! increments; everything the truth feels that the nominal model omits is
//! booked into the lumped terms `(Delta1, Delta2)` so that
//!
//! ```text
//! alpha_dot = f1_nom + q + Delta1
//! q_dot     = f2_nom + h2_nom fin + Delta2
//! ```
//!
//! hold exactly. That identity is what the adaptation scheme estimates
//! against, and it is asserted to near machine precision in the tests.

use serde::{Deserialize, Serialize};

use crate::airframe::{AeroCoefficients, AeroModel, LongitudinalState, MassProperties};
use crate::atmosphere::AtmosphereSample;
use crate::error::{SimError, SimResult};

/// Minimal flight condition for term evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightPoint {
    /// Angle of attack [rad].
    pub alpha: f64,
    /// Pitch rate [rad/s].
    pub q: f64,
    /// Airspeed [m/s].
    pub speed: f64,
}

impl From<&LongitudinalState> for FlightPoint {
    fn from(s: &LongitudinalState) -> Self {
        Self { alpha: s.alpha(), q: s.q, speed: s.speed() }
    }
}

/// Evaluated decomposition terms at one flight condition. `h1` is the
/// contribution at a specific fin deflection; `g1`/`g2` are zero on the
/// nominal side.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StrictFeedbackTerms {
    pub f1: f64,
    pub f2: f64,
    pub h1: f64,
    pub h2: f64,
    pub g1: f64,
    pub g2: f64,
}

/// What the truth plant feels beyond the nominal model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyConfig {
    /// Multiplicative fraction applied to the whole coefficient buildup
    /// in the truth plant (0.3 = +30%).
    pub delta_pert: f64,
    /// Additive normal-coefficient increment from induced roll coupling.
    pub coupling_cn: f64,
    /// Additive moment-coefficient increment from induced roll coupling.
    pub coupling_cm: f64,
    /// Replace `coupling_cn`/`coupling_cm` with the airframe's worst-case
    /// values (10% of the peak tabulated |C_N0| and |C_M0|).
    pub worst_case_coupling: bool,
    /// Whether the truth plant feels the fin force in the alpha channel.
    /// Physical flight does; switching it off gives the exact-model case.
    pub inject_h1: bool,
}

impl Default for UncertaintyConfig {
    fn default() -> Self {
        Self {
            delta_pert: 0.0,
            coupling_cn: 0.0,
            coupling_cm: 0.0,
            worst_case_coupling: false,
            inject_h1: true,
        }
    }
}

impl UncertaintyConfig {
    pub fn validate(&self) -> SimResult<()> {
        if self.delta_pert < 0.0 {
            return Err(SimError::Config("delta_pert must be >= 0".into()));
        }
        if !self.delta_pert.is_finite()
            || !self.coupling_cn.is_finite()
            || !self.coupling_cm.is_finite()
        {
            return Err(SimError::Config("uncertainty values must be finite".into()));
        }
        Ok(())
    }

    /// Resolve the worst-case flag into concrete coupling magnitudes.
    pub fn resolved(&self, aero: &AeroModel) -> Self {
        if self.worst_case_coupling {
            let (cn, cm) = aero.worst_case_coupling();
            Self {
                coupling_cn: cn,
                coupling_cm: cm,
                worst_case_coupling: false,
                ..*self
            }
        } else {
            *self
        }
    }

    /// Coefficient multiplier for the truth plant.
    pub fn scale(&self) -> f64 {
        1.0 + self.delta_pert
    }

    /// Apply the uncertainty to a nominal coefficient buildup: scale the
    /// buildup, then add the coupling increments. The coupling enters the
    /// normal force and the moment directly (no CG re-transfer).
    pub fn perturb(&self, c: &AeroCoefficients) -> AeroCoefficients {
        let k = self.scale();
        AeroCoefficients {
            c_a: k * c.c_a,
            c_n: k * c.c_n + self.coupling_cn,
            c_m: k * c.c_m + self.coupling_cm,
        }
    }
}

/// Term evaluator over a given aero model, optionally with the truth
/// plant's multiplicative coefficient scale.
#[derive(Debug, Clone, Copy)]
pub struct ModelEval<'a> {
    aero: &'a AeroModel,
    scale: f64,
}

impl<'a> ModelEval<'a> {
    /// Controller-side evaluator: unscaled coefficients.
    pub fn nominal(aero: &'a AeroModel) -> Self {
        Self { aero, scale: 1.0 }
    }

    /// Truth-side evaluator with multiplicative uncertainty.
    pub fn perturbed(aero: &'a AeroModel, delta_pert: f64) -> Self {
        Self { aero, scale: 1.0 + delta_pert }
    }

    fn qs_over_mv(
        &self,
        p: &FlightPoint,
        atmos: &AtmosphereSample,
        mass: &MassProperties,
    ) -> SimResult<f64> {
        if p.speed <= 0.0 {
            return Err(SimError::SingularFlightCondition { t: f64::NAN });
        }
        Ok(atmos.dynamic_pressure * self.aero.reference_area / (mass.mass * p.speed))
    }

    fn qsl_over_iyy(&self, atmos: &AtmosphereSample, mass: &MassProperties) -> f64 {
        atmos.dynamic_pressure * self.aero.reference_area * self.aero.reference_length
            / mass.inertia_yy
    }

    pub fn f1(
        &self,
        p: &FlightPoint,
        atmos: &AtmosphereSample,
        mass: &MassProperties,
    ) -> SimResult<f64> {
        let qs_mv = self.qs_over_mv(p, atmos, mass)?;
        let (sin_a, cos_a) = p.alpha.sin_cos();
        let c_n0 = self.aero.c_n0(p.alpha, atmos.mach)?;
        let c_a_static = self.aero.c_a_static(p.alpha, atmos.mach)?;
        Ok(-self.scale * qs_mv * (c_n0 * cos_a - c_a_static * sin_a)
            - mass.thrust * sin_a / (mass.mass * p.speed))
    }

    pub fn f2(
        &self,
        p: &FlightPoint,
        atmos: &AtmosphereSample,
        mass: &MassProperties,
    ) -> SimResult<f64> {
        if p.speed <= 0.0 {
            return Err(SimError::SingularFlightCondition { t: f64::NAN });
        }
        let l = self.aero.reference_length;
        let c_m0 = self.aero.c_m0(p.alpha, atmos.mach)?;
        let c_mq = self.aero.c_mq(atmos.mach)?;
        let c_n0 = self.aero.c_n0(p.alpha, atmos.mach)?;
        Ok(self.scale
            * self.qsl_over_iyy(atmos, mass)
            * (c_m0 + c_mq * p.q * l / (2.0 * p.speed) - c_n0 * mass.cg_shift() / l))
    }

    /// Fin contribution to the alpha channel. The controller never
    /// compensates this term; the truth plant feels it and it lands in
    /// `Delta1`.
    pub fn h1(
        &self,
        p: &FlightPoint,
        fin: f64,
        atmos: &AtmosphereSample,
        mass: &MassProperties,
    ) -> SimResult<f64> {
        let qs_mv = self.qs_over_mv(p, atmos, mass)?;
        let (sin_a, cos_a) = p.alpha.sin_cos();
        let c_n_delta = self.aero.c_n_delta(p.alpha, atmos.mach)?;
        let c_a_delta = self.aero.c_a_delta(atmos.mach)?;
        let half_fin_sq = (fin.abs() / 2.0) * (fin.abs() / 2.0);
        Ok(-self.scale * qs_mv * (c_n_delta * fin * cos_a - c_a_delta * half_fin_sq * sin_a))
    }

    pub fn h2(
        &self,
        p: &FlightPoint,
        atmos: &AtmosphereSample,
        mass: &MassProperties,
    ) -> SimResult<f64> {
        if p.speed <= 0.0 {
            return Err(SimError::SingularFlightCondition { t: f64::NAN });
        }
        let l = self.aero.reference_length;
        let c_m_delta = self.aero.c_m_delta(p.alpha, atmos.mach)?;
        let c_n_delta = self.aero.c_n_delta(p.alpha, atmos.mach)?;
        let effectiveness = c_m_delta - c_n_delta * mass.cg_shift() / l;
        if effectiveness.abs() < self.aero.effectiveness_floor {
            return Err(SimError::EffectivenessLoss {
                value: effectiveness,
                floor: self.aero.effectiveness_floor,
            });
        }
        Ok(self.scale * self.qsl_over_iyy(atmos, mass) * effectiveness)
    }
}

/// Roll-coupling terms at their configured (worst-case) magnitudes.
pub fn eval_coupling(
    aero: &AeroModel,
    p: &FlightPoint,
    atmos: &AtmosphereSample,
    mass: &MassProperties,
    cfg: &UncertaintyConfig,
) -> SimResult<(f64, f64)> {
    if p.speed <= 0.0 {
        return Err(SimError::SingularFlightCondition { t: f64::NAN });
    }
    let qs = atmos.dynamic_pressure * aero.reference_area;
    let g1 = -(qs / (mass.mass * p.speed)) * cfg.coupling_cn * p.alpha.cos();
    let g2 = qs * aero.reference_length / mass.inertia_yy * cfg.coupling_cm;
    Ok((g1, g2))
}

/// Evaluate the full nominal term set (g terms zero).
pub fn nominal_terms(
    aero: &AeroModel,
    p: &FlightPoint,
    fin: f64,
    atmos: &AtmosphereSample,
    mass: &MassProperties,
) -> SimResult<StrictFeedbackTerms> {
    let eval = ModelEval::nominal(aero);
    Ok(StrictFeedbackTerms {
        f1: eval.f1(p, atmos, mass)?,
        f2: eval.f2(p, atmos, mass)?,
        h1: eval.h1(p, fin, atmos, mass)?,
        h2: eval.h2(p, atmos, mass)?,
        g1: 0.0,
        g2: 0.0,
    })
}

/// Evaluate the truth-side term set: scaled coefficients, coupling terms,
/// and `h1` zeroed if the scenario disables its injection.
pub fn truth_terms(
    aero: &AeroModel,
    p: &FlightPoint,
    fin: f64,
    atmos: &AtmosphereSample,
    mass: &MassProperties,
    cfg: &UncertaintyConfig,
) -> SimResult<StrictFeedbackTerms> {
    let eval = ModelEval::perturbed(aero, cfg.delta_pert);
    let (g1, g2) = eval_coupling(aero, p, atmos, mass, cfg)?;
    Ok(StrictFeedbackTerms {
        f1: eval.f1(p, atmos, mass)?,
        f2: eval.f2(p, atmos, mass)?,
        h1: if cfg.inject_h1 {
            eval.h1(p, fin, atmos, mass)?
        } else {
            0.0
        },
        h2: eval.h2(p, atmos, mass)?,
        g1,
        g2,
    })
}

/// Lumped unknown terms: everything the truth plant feels that the
/// nominal model omits, evaluated at the same flight condition.
pub fn truth_uncertainties(
    nominal: &StrictFeedbackTerms,
    truth: &StrictFeedbackTerms,
    fin: f64,
) -> (f64, f64) {
    let delta1 = (truth.f1 - nominal.f1) + truth.g1 + truth.h1;
    let delta2 = (truth.f2 - nominal.f2) + (truth.h2 - nominal.h2) * fin + truth.g2;
    (delta1, delta2)
}
