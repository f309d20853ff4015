//! Longitudinal plant model: rigid-body pitch-plane dynamics, coefficient
//! buildup from interpolation tables, and time-varying mass properties
//! during boost.
//!
//! Axes follow the usual body convention: `u` forward, `w` toward the
//! belly, pitch rate `q` about the spanwise axis. The vehicle maneuvers
//! in a plane at constant altitude (launch with 90 deg roll), so gravity
//! never enters the pitch dynamics and the atmosphere is sampled at the
//! scenario altitude throughout.

use serde::{Deserialize, Serialize};

use crate::atmosphere::AtmosphereSample;
use crate::error::{SimError, SimResult};
use crate::tables::{Table1, Table2};

/// Incidence range covered by the shipped tables [rad].
pub const ALPHA_ENVELOPE: f64 = std::f64::consts::FRAC_PI_2;

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

/// Plant truth state. `theta` and the plane coordinates are bookkeeping:
/// they do not feed back into the dynamics but give the velocity-vector
/// heading used to detect a completed turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongitudinalState {
    /// Forward body velocity [m/s].
    pub u: f64,
    /// Normal body velocity [m/s].
    pub w: f64,
    /// Pitch rate [rad/s].
    pub q: f64,
    /// Pitch attitude in the maneuver plane [rad].
    pub theta: f64,
    /// Maneuver-plane position along the launch direction [m].
    pub pos_x: f64,
    /// Maneuver-plane position normal to the launch direction [m].
    pub pos_z: f64,
    /// Time since launch [s].
    pub t: f64,
}

impl LongitudinalState {
    pub fn from_flight_condition(speed: f64, alpha: f64, q: f64, t: f64) -> Self {
        Self {
            u: speed * alpha.cos(),
            w: speed * alpha.sin(),
            q,
            theta: alpha, // level velocity vector: gamma = theta - alpha = 0
            pos_x: 0.0,
            pos_z: 0.0,
            t,
        }
    }

    /// Angle of attack, atan2(w, u) [rad].
    pub fn alpha(&self) -> f64 {
        self.w.atan2(self.u)
    }

    /// Airspeed magnitude [m/s].
    pub fn speed(&self) -> f64 {
        (self.u * self.u + self.w * self.w).sqrt()
    }

    /// Velocity-vector heading in the maneuver plane [rad].
    pub fn flight_path_angle(&self) -> f64 {
        self.theta - self.alpha()
    }
}

/// Time derivative of the dynamic states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub du: f64,
    pub dw: f64,
    pub dq: f64,
    pub dtheta: f64,
    pub dpos_x: f64,
    pub dpos_z: f64,
}

// ---------------------------------------------------------------------------
// Mass properties
// ---------------------------------------------------------------------------

/// Mass state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    /// Mass [kg].
    pub mass: f64,
    /// Pitch moment of inertia [kg m^2].
    pub inertia_yy: f64,
    /// Center-of-gravity station [m from nose].
    pub x_cg: f64,
    /// CG station at launch, the moment reference [m from nose].
    pub x_cg_ref: f64,
    /// Thrust [N].
    pub thrust: f64,
}

impl MassProperties {
    /// CG shift since launch, x_cg_ref - x_cg [m].
    pub fn cg_shift(&self) -> f64 {
        self.x_cg_ref - self.x_cg
    }
}

/// Mass endpoint used by [`BoostSchedule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassPoint {
    pub mass_kg: f64,
    pub inertia_kgm2: f64,
    pub x_cg_m: f64,
}

/// Piecewise-affine mass history: linear from launch to burnout, constant
/// after. Thrust applies on the closed interval [0, t_burnout].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostSchedule {
    pub launch: MassPoint,
    pub burnout: MassPoint,
    pub t_burnout_s: f64,
    pub thrust_n: f64,
}

impl BoostSchedule {
    pub fn validate(&self) -> SimResult<()> {
        for (name, p) in [("launch", &self.launch), ("burnout", &self.burnout)] {
            if p.mass_kg <= 0.0 || p.inertia_kgm2 <= 0.0 {
                return Err(SimError::Config(format!(
                    "mass schedule {name}: mass and inertia must be positive"
                )));
            }
        }
        if self.t_burnout_s <= 0.0 {
            return Err(SimError::Config("t_burnout_s must be positive".into()));
        }
        if self.thrust_n < 0.0 {
            return Err(SimError::Config("thrust_n must be non-negative".into()));
        }
        Ok(())
    }

    /// Mass properties at time `t` [s].
    pub fn at(&self, t: f64) -> MassProperties {
        debug_assert!(t >= -1e-12, "mass schedule queried before launch");
        if t <= self.t_burnout_s {
            let s = (t / self.t_burnout_s).clamp(0.0, 1.0);
            let lerp = |a: f64, b: f64| a + s * (b - a);
            MassProperties {
                mass: lerp(self.launch.mass_kg, self.burnout.mass_kg),
                inertia_yy: lerp(self.launch.inertia_kgm2, self.burnout.inertia_kgm2),
                x_cg: lerp(self.launch.x_cg_m, self.burnout.x_cg_m),
                x_cg_ref: self.launch.x_cg_m,
                thrust: self.thrust_n,
            }
        } else {
            MassProperties {
                mass: self.burnout.mass_kg,
                inertia_yy: self.burnout.inertia_kgm2,
                x_cg: self.burnout.x_cg_m,
                x_cg_ref: self.launch.x_cg_m,
                thrust: 0.0,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Aerodynamic model
// ---------------------------------------------------------------------------

/// Coefficient-component tables. Incidence-dependent components are
/// bilinear in (alpha, Mach); the rest are linear in Mach.
#[derive(Debug, Clone, PartialEq)]
pub struct AeroModel {
    /// Reference area [m^2].
    pub reference_area: f64,
    /// Reference length [m].
    pub reference_length: f64,
    /// Lower bound on |C_Mdelta - C_Ndelta * cg_shift / l| before the fin
    /// is declared ineffective.
    pub effectiveness_floor: f64,
    c_n0: Table2,
    c_n_delta: Table2,
    c_m0: Table2,
    c_m_delta: Table2,
    c_a0: Table1,
    c_a_alpha: Table1,
    c_a_delta: Table1,
    dc_a_thrust: Table1,
    c_mq: Table1,
}

/// Total coefficients from one buildup evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroCoefficients {
    pub c_a: f64,
    pub c_n: f64,
    pub c_m: f64,
}

impl AeroModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        reference_area: f64,
        reference_length: f64,
        effectiveness_floor: f64,
        c_n0: Table2,
        c_n_delta: Table2,
        c_m0: Table2,
        c_m_delta: Table2,
        c_a0: Table1,
        c_a_alpha: Table1,
        c_a_delta: Table1,
        dc_a_thrust: Table1,
        c_mq: Table1,
    ) -> SimResult<Self> {
        if reference_area <= 0.0 || reference_length <= 0.0 {
            return Err(SimError::Config(
                "reference area and length must be positive".into(),
            ));
        }
        let model = Self {
            reference_area,
            reference_length,
            effectiveness_floor,
            c_n0,
            c_n_delta,
            c_m0,
            c_m_delta,
            c_a0,
            c_a_alpha,
            c_a_delta,
            dc_a_thrust,
            c_mq,
        };
        model.check_symmetry()?;
        model.check_effectiveness()?;
        Ok(model)
    }

    /// A symmetric airframe develops no normal force or static moment at
    /// zero incidence.
    fn check_symmetry(&self) -> SimResult<()> {
        for (name, table) in [("c_n0", &self.c_n0), ("c_m0", &self.c_m0)] {
            if !table.row_points().contains(&0.0) {
                return Err(SimError::Table(format!(
                    "{name}: alpha grid must contain zero"
                )));
            }
            for &m in table.col_points() {
                let v = table.lookup("alpha [rad]", "mach", 0.0, m)?;
                if v.abs() > 1e-9 {
                    return Err(SimError::Table(format!(
                        "{name}: must vanish at alpha = 0 (got {v} at M = {m})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The bare fin moment coefficient must stay away from zero over the
    /// whole table, otherwise the control inversion is ill-posed.
    fn check_effectiveness(&self) -> SimResult<()> {
        let min_abs = self
            .c_m_delta
            .values()
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if min_abs < self.effectiveness_floor {
            return Err(SimError::Table(format!(
                "c_m_delta: |value| reaches {min_abs:.4}, below the \
                 effectiveness floor {:.4}",
                self.effectiveness_floor
            )));
        }
        Ok(())
    }

    // Component accessors. Alpha in radians.

    pub fn c_n0(&self, alpha: f64, mach: f64) -> SimResult<f64> {
        self.c_n0.lookup("alpha [rad]", "mach", alpha, mach)
    }

    pub fn c_n_delta(&self, alpha: f64, mach: f64) -> SimResult<f64> {
        self.c_n_delta.lookup("alpha [rad]", "mach", alpha, mach)
    }

    pub fn c_m0(&self, alpha: f64, mach: f64) -> SimResult<f64> {
        self.c_m0.lookup("alpha [rad]", "mach", alpha, mach)
    }

    pub fn c_m_delta(&self, alpha: f64, mach: f64) -> SimResult<f64> {
        self.c_m_delta.lookup("alpha [rad]", "mach", alpha, mach)
    }

    pub fn c_a0(&self, mach: f64) -> SimResult<f64> {
        self.c_a0.lookup("mach", mach)
    }

    pub fn c_a_alpha(&self, mach: f64) -> SimResult<f64> {
        self.c_a_alpha.lookup("mach", mach)
    }

    pub fn c_a_delta(&self, mach: f64) -> SimResult<f64> {
        self.c_a_delta.lookup("mach", mach)
    }

    pub fn dc_a_thrust(&self, mach: f64) -> SimResult<f64> {
        self.dc_a_thrust.lookup("mach", mach)
    }

    pub fn c_mq(&self, mach: f64) -> SimResult<f64> {
        self.c_mq.lookup("mach", mach)
    }

    /// Axial-force buildup without the fin-drag term (the part that is
    /// independent of the control deflection).
    pub fn c_a_static(&self, alpha: f64, mach: f64) -> SimResult<f64> {
        Ok(self.c_a0(mach)? + self.c_a_alpha(mach)? * alpha + self.dc_a_thrust(mach)?)
    }

    /// Full coefficient buildup at one flight condition. Roll-coupling
    /// increments are not part of the buildup; the uncertainty layer adds
    /// them to the truth plant only.
    pub fn coefficients(
        &self,
        alpha: f64,
        mach: f64,
        fin: f64,
        pitch_rate: f64,
        speed: f64,
        mass: &MassProperties,
    ) -> SimResult<AeroCoefficients> {
        let half_fin_sq = (fin.abs() / 2.0) * (fin.abs() / 2.0);
        let c_a = self.c_a_static(alpha, mach)? + self.c_a_delta(mach)? * half_fin_sq;
        let c_n = self.c_n0(alpha, mach)? + self.c_n_delta(alpha, mach)? * fin;
        let l = self.reference_length;
        let c_m = self.c_m0(alpha, mach)?
            + self.c_mq(mach)? * pitch_rate * l / (2.0 * speed)
            + self.c_m_delta(alpha, mach)? * fin
            - c_n * mass.cg_shift() / l;
        Ok(AeroCoefficients { c_a, c_n, c_m })
    }

    /// Worst-case roll-coupling increments: 10% of the peak tabulated
    /// |C_N0| and |C_M0|, signed so the two channels push the trim in the
    /// same direction.
    pub fn worst_case_coupling(&self) -> (f64, f64) {
        (0.1 * self.c_n0.max_abs(), -0.1 * self.c_m0.max_abs())
    }
}

/// Body-axis forces and pitching moment from total coefficients.
/// Returns (F_x, F_z, M_y) in [N, N, N m].
pub fn forces_moments(
    coeffs: &AeroCoefficients,
    dynamic_pressure: f64,
    aero: &AeroModel,
) -> (f64, f64, f64) {
    let qs = dynamic_pressure * aero.reference_area;
    (
        -qs * coeffs.c_a,
        -qs * coeffs.c_n,
        qs * aero.reference_length * coeffs.c_m,
    )
}

/// Rigid-body pitch-plane equations of motion given already-evaluated
/// forces. Gravity is absent: the maneuver plane is horizontal.
pub fn equations_of_motion(
    state: &LongitudinalState,
    fx: f64,
    fz: f64,
    my: f64,
    mass: &MassProperties,
) -> StateDerivative {
    StateDerivative {
        du: -state.w * state.q + (fx + mass.thrust) / mass.mass,
        dw: state.u * state.q + fz / mass.mass,
        dq: my / mass.inertia_yy,
        dtheta: state.q,
        dpos_x: state.u * state.theta.cos() + state.w * state.theta.sin(),
        dpos_z: -state.u * state.theta.sin() + state.w * state.theta.cos(),
    }
}

/// Nominal plant derivative: coefficient buildup, forces, then the
/// equations of motion.
pub fn state_derivative(
    state: &LongitudinalState,
    fin: f64,
    mass: &MassProperties,
    atmos: &AtmosphereSample,
    aero: &AeroModel,
) -> SimResult<StateDerivative> {
    let speed = state.speed();
    if speed <= 0.0 {
        return Err(SimError::SingularFlightCondition { t: state.t });
    }
    let coeffs = aero.coefficients(
        state.alpha(),
        atmos.mach,
        fin,
        state.q,
        speed,
        mass,
    )?;
    let (fx, fz, my) = forces_moments(&coeffs, atmos.dynamic_pressure, aero);
    Ok(equations_of_motion(state, fx, fz, my, mass))
}

// ---------------------------------------------------------------------------
// Complete airframe + default parameter set
// ---------------------------------------------------------------------------

/// Aerodynamic model plus mass schedule: everything the plant needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Airframe {
    pub name: String,
    pub aero: AeroModel,
    pub boost: BoostSchedule,
}

/// Synthetic short-range air-to-air airframe. The values are plausible
/// for the class (90 kg at launch, 0.18 m body, boost to roughly Mach 1.5
/// in 2.5 s) but are this project's own defaults, not measured data.
/// Every number can be overridden from an airframe file.
pub fn default_airframe() -> Airframe {
    let alpha_deg: Vec<f64> = (-18..=18).map(|i| f64::from(i) * 5.0).collect();
    let alpha_rad: Vec<f64> = alpha_deg.iter().map(|a| a.to_radians()).collect();
    let mach: Vec<f64> = vec![
        0.0, 0.3, 0.6, 0.8, 0.9, 1.0, 1.1, 1.2, 1.4, 1.6, 2.0, 2.4, 3.0,
    ];

    // Transonic bump and supersonic fin-effectiveness taper.
    let fm = |m: f64| 1.0 + 0.2 * (-8.0 * (m - 1.05) * (m - 1.05)).exp();
    let gm = |m: f64| 1.2 - 0.12 * m;

    let c_n0 = |a: f64, m: f64| 6.0 * a.sin() * a.cos() * fm(m) + 3.5 * a.sin() * a.sin().abs();
    let c_n_delta = |a: f64, m: f64| 0.9 * (0.6 + 0.4 * a.cos()) * gm(m);
    // Statically stable at moderate incidence, weakening and finally
    // reversing as the body approaches 90 deg.
    let c_m0 = |a: f64, m: f64| -2.0 * a.sin() * a.cos() * fm(m) + 0.4 * a.sin().powi(3);
    let c_m_delta = |a: f64, m: f64| -26.0 * (0.75 + 0.25 * a.cos()) * gm(m);
    let c_a0 = |m: f64| 0.28 + 0.24 * (-12.0 * (m - 1.1) * (m - 1.1)).exp() + 0.03 * m;
    let c_a_alpha = |m: f64| -0.12 * (1.0 + 0.15 * (-12.0 * (m - 1.1) * (m - 1.1)).exp());
    let c_a_delta = |m: f64| 1.4 * (1.0 + 0.2 * (-12.0 * (m - 1.1) * (m - 1.1)).exp());
    let c_mq = |m: f64| -130.0 * gm(m);

    let aero = AeroModel::new(
        0.025_447,
        0.18,
        1.0,
        Table2::from_fn(alpha_rad.clone(), mach.clone(), c_n0).unwrap(),
        Table2::from_fn(alpha_rad.clone(), mach.clone(), c_n_delta).unwrap(),
        Table2::from_fn(alpha_rad.clone(), mach.clone(), c_m0).unwrap(),
        Table2::from_fn(alpha_rad.clone(), mach.clone(), c_m_delta).unwrap(),
        Table1::from_fn(mach.clone(), c_a0).unwrap(),
        Table1::from_fn(mach.clone(), c_a_alpha).unwrap(),
        Table1::from_fn(mach.clone(), c_a_delta).unwrap(),
        Table1::from_fn(mach.clone(), |_| 0.0).unwrap(),
        Table1::from_fn(mach, c_mq).unwrap(),
    )
    .expect("default airframe tables are well formed");

    Airframe {
        name: "synthetic-aam".into(),
        aero,
        boost: BoostSchedule {
            launch: MassPoint {
                mass_kg: 90.0,
                inertia_kgm2: 30.0,
                x_cg_m: 1.45,
            },
            burnout: MassPoint {
                mass_kg: 65.0,
                inertia_kgm2: 22.5,
                x_cg_m: 1.37,
            },
            t_burnout_s: 2.5,
            thrust_n: 9000.0,
        },
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

/// On-disk airframe description. Alpha grid in degrees; 2-D tables are
/// row-per-alpha, column-per-Mach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirframeFile {
    pub name: String,
    pub reference_area_m2: f64,
    pub reference_length_m: f64,
    #[serde(default = "default_floor")]
    pub control_effectiveness_floor: f64,
    pub mass_schedule: BoostSchedule,
    pub tables: AeroTablesFile,
}

fn default_floor() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeroTablesFile {
    pub alpha_deg: Vec<f64>,
    pub mach: Vec<f64>,
    pub c_n0: Vec<Vec<f64>>,
    pub c_n_delta: Vec<Vec<f64>>,
    pub c_m0: Vec<Vec<f64>>,
    pub c_m_delta: Vec<Vec<f64>>,
    pub c_a0: Vec<f64>,
    pub c_a_alpha: Vec<f64>,
    pub c_a_delta: Vec<f64>,
    #[serde(default)]
    pub dc_a_thrust: Vec<f64>,
    pub c_mq: Vec<f64>,
}

impl AirframeFile {
    pub fn into_airframe(self) -> SimResult<Airframe> {
        self.mass_schedule.validate()?;
        let alpha_rad: Vec<f64> = self.tables.alpha_deg.iter().map(|a| a.to_radians()).collect();
        let mach = self.tables.mach;
        let t2 = |values: Vec<Vec<f64>>| Table2::new(alpha_rad.clone(), mach.clone(), values);
        let t1 = |values: Vec<f64>| Table1::new(mach.clone(), values);
        let dc_a_thrust = if self.tables.dc_a_thrust.is_empty() {
            vec![0.0; mach.len()]
        } else {
            self.tables.dc_a_thrust
        };
        let aero = AeroModel::new(
            self.reference_area_m2,
            self.reference_length_m,
            self.control_effectiveness_floor,
            t2(self.tables.c_n0)?,
            t2(self.tables.c_n_delta)?,
            t2(self.tables.c_m0)?,
            t2(self.tables.c_m_delta)?,
            t1(self.tables.c_a0)?,
            t1(self.tables.c_a_alpha)?,
            t1(self.tables.c_a_delta)?,
            t1(dc_a_thrust)?,
            t1(self.tables.c_mq)?,
        )?;
        Ok(Airframe {
            name: self.name,
            aero,
            boost: self.mass_schedule,
        })
    }

    pub fn from_path(path: &std::path::Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| SimError::Config(format!("airframe file {}: {e}", path.display())))
    }
}
