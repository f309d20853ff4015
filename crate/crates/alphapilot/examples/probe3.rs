// scratch probe: gentler accel/blend scenarios, jump scaling
use alphapilot::profile::AlphaProfile;
use alphapilot::scenario::{CommandSource, Scenario};
use alphapilot::sim::run_scenario;

fn main() {
    // gentler acceleration step during boost
    for (accel, limit_deg, tf) in [(30.0, 25.0, 4.0), (40.0, 30.0, 3.0), (25.0, 25.0, 5.0)] {
        let mut acc = Scenario::default_step(0.0);
        acc.command = CommandSource::AccelStep { magnitude: accel, time: 0.1 };
        acc.controller.alpha_cmd_limit = (limit_deg as f64).to_radians();
        acc.t_final = tf;
        let out = run_scenario(&acc);
        let tail: Vec<f64> = out
            .telemetry
            .iter()
            .filter(|r| r.t > tf - 0.5)
            .map(|r| r.accel_normal)
            .collect();
        let mean_az = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
        let last = out.telemetry.last().unwrap();
        println!(
            "accel {accel} lim {limit_deg} tf {tf}: abort {:?} az tail {:.2} alpha {:.1} deg V {:.0}",
            out.abort.map(|e| e.to_string()),
            mean_az,
            last.alpha.to_degrees(),
            last.speed
        );
    }

    // gentler blend: shorter turn, trigger while fast
    let samples: Vec<(f64, f64)> = (0..=300)
        .map(|k| {
            let t = 2.0 * k as f64 / 300.0;
            let s = (std::f64::consts::PI * t / 2.0).sin();
            (t, 45.0_f64.to_radians() * s * s)
        })
        .collect();
    let mut blend = Scenario::default_step(0.0);
    blend.command = CommandSource::TurnThenAccel {
        profile: AlphaProfile::new(samples).unwrap(),
        accel: 30.0,
    };
    blend.heading_reversal = 40.0_f64.to_radians();
    blend.turn_exit_alpha = 15.0_f64.to_radians();
    blend.controller.alpha_cmd_limit = 30.0_f64.to_radians();
    blend.t_final = 5.0;
    blend.controller.shaping.natural_freq = 150.0;
    let out = run_scenario(&blend);
    let trigger_idx = out.telemetry.iter().position(|r| r.lambda > 0.0);
    println!(
        "blend: abort {:?} trigger {:?}",
        out.abort.as_ref().map(|e| e.to_string()),
        trigger_idx.map(|i| out.telemetry[i].t)
    );
    if let Some(i0) = trigger_idx {
        let w = 60; // +/-60 ms window around trigger
        let lo = i0.saturating_sub(w);
        let hi = (i0 + w).min(out.telemetry.len() - 1);
        let max_jump_near = out.telemetry[lo..hi]
            .windows(2)
            .map(|w| (w[1].alpha_cmd_raw - w[0].alpha_cmd_raw).abs())
            .fold(0.0_f64, f64::max);
        let max_jump_all = out
            .telemetry
            .windows(2)
            .map(|w| (w[1].alpha_cmd_raw - w[0].alpha_cmd_raw).abs())
            .fold(0.0_f64, f64::max);
        let last = out.telemetry.last().unwrap();
        println!(
            "blend: jump near trigger {:.4} deg, global {:.4} deg, final az {:.1} (cmd 30) V {:.0}",
            max_jump_near.to_degrees(),
            max_jump_all.to_degrees(),
            last.accel_normal,
            last.speed
        );
    }

    // estimator per-step jump scales with dt (discrete continuity)
    let mut unc = Scenario::default_step(20.0);
    unc.uncertainty.delta_pert = 0.3;
    let (cn, cm) = unc.airframe.aero.worst_case_coupling();
    unc.uncertainty.coupling_cn = cn;
    unc.uncertainty.coupling_cm = cm;
    unc.t_final = 4.0;
    let jump_stats = |dt: f64| {
        let mut s = unc.clone();
        s.dt = dt;
        let out = run_scenario(&s);
        let mut max_all = 0.0_f64;
        let mut max_tail = 0.0_f64;
        let mut bound_tail = 0.0_f64;
        let tau = s.controller.gains.tau_d;
        for w in out.telemetry.windows(2) {
            let j = (w[1].delta1_hat - w[0].delta1_hat)
                .abs()
                .max((w[1].delta2_hat - w[0].delta2_hat).abs());
            max_all = max_all.max(j);
            if w[0].t > 1.5 {
                max_tail = max_tail.max(j);
                bound_tail = bound_tail.max(
                    dt / tau
                        * (w[0].delta1_true - w[0].delta1_hat)
                            .abs()
                            .max((w[0].delta2_true - w[0].delta2_hat).abs()),
                );
            }
        }
        (max_all, max_tail, bound_tail)
    };
    let (a1, t1, b1) = jump_stats(1e-3);
    let (a2, t2, b2) = jump_stats(5e-4);
    println!(
        "est jumps dt=1e-3: all {a1:.4} tail {t1:.6} (bound {b1:.6}); dt=5e-4: all {a2:.4} tail {t2:.6} (bound {b2:.6}); all-ratio {:.2}",
        a1 / a2
    );
}
