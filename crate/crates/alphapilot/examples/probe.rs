// scratch probe used during development
use alphapilot::scenario::Scenario;
use alphapilot::sim::{compare_adaptation, run_scenario};

fn main() {
    let mut sc = Scenario::default_step(20.0);
    sc.t_final = 6.0;
    let out = run_scenario(&sc);
    println!("nominal abort: {:?}", out.abort);
    if let Some(m) = &out.metrics {
        println!(
            "nominal: rise {:?} settle {:?} overshoot {:?} sse {:.6} deg peak_fin {:.2} deg peak_rate {:.1} dps",
            m.rise_time_s,
            m.settling_time_s,
            m.overshoot_pct,
            m.steady_state_error_rad.to_degrees(),
            m.peak_fin_rad.to_degrees(),
            m.peak_fin_rate_rads.to_degrees()
        );
    }
    let last = out.telemetry.last().unwrap();
    println!(
        "final: t={:.2} alpha={:.3} deg V={:.1} M={:.3} fin={:.2} deg d1hat={:.4} d1true={:.4} d2hat={:.3} d2true={:.3}",
        last.t,
        last.alpha.to_degrees(),
        last.speed,
        last.mach,
        last.fin.to_degrees(),
        last.delta1_hat,
        last.delta1_true,
        last.delta2_hat,
        last.delta2_true
    );

    // uncertain paired run
    let mut unc = Scenario::default_step(20.0);
    unc.t_final = 6.0;
    unc.uncertainty.delta_pert = 0.3;
    let (cn, cm) = unc.airframe.aero.worst_case_coupling();
    unc.uncertainty.coupling_cn = cn;
    unc.uncertainty.coupling_cm = cm;
    println!("worst-case coupling: cn={cn:.4} cm={cm:.4}");
    let cmp = compare_adaptation(&unc);
    println!("off abort {:?}  on abort {:?}", cmp.off.abort, cmp.on.abort);
    let sse_off = cmp.off.metrics.as_ref().unwrap().steady_state_error_rad;
    let sse_on = cmp.on.metrics.as_ref().unwrap().steady_state_error_rad;
    println!(
        "sse off {:.4} deg   on {:.5} deg   ratio {:.1}",
        sse_off.to_degrees(),
        sse_on.to_degrees(),
        sse_off / sse_on
    );
    let m_on = cmp.on.metrics.as_ref().unwrap();
    println!(
        "on: peak_fin {:.2} deg  rms_d1 {:.4} rms_d2 {:.3}",
        m_on.peak_fin_rad.to_degrees(),
        m_on.rms_delta1_est_err,
        m_on.rms_delta2_est_err
    );

    // profile tracking (criterion-7 conditions)
    use alphapilot::profile::synthetic_agile_profile;
    use alphapilot::scenario::CommandSource;
    let mut prof = Scenario::default_step(0.0);
    prof.command = CommandSource::AlphaProfile(synthetic_agile_profile());
    prof.t_final = 3.0;
    prof.controller.shaping.natural_freq = 150.0;
    for omega in [50.0, 100.0, 150.0] {
        prof.controller.shaping.natural_freq = omega;
        let out = run_scenario(&prof);
        let m = out.metrics.as_ref().unwrap();
        let peak_z1 = out
            .telemetry
            .iter()
            .map(|r| (r.alpha - r.alpha_cmd_shaped).abs())
            .fold(0.0_f64, f64::max);
        println!(
            "profile omega_f={omega}: abort {:?} peak_err_vs_raw {:.3} deg  vs_shaped {:.3} deg  peak_fin {:.1} deg",
            out.abort,
            m.peak_tracking_error_rad.to_degrees(),
            peak_z1.to_degrees(),
            m.peak_fin_rad.to_degrees()
        );
    }

    // equilibrium: zero command, trimmed start
    let mut eq = Scenario::default_step(0.0);
    eq.command = CommandSource::AlphaStep { magnitude: 0.0, time: 0.1 };
    eq.t_final = 4.0;
    let out = run_scenario(&eq);
    let peak_alpha = out
        .telemetry
        .iter()
        .map(|r| r.alpha.abs())
        .fold(0.0_f64, f64::max);
    println!("equilibrium: abort {:?} peak |alpha| = {:.3e} rad", out.abort, peak_alpha);

    // step response with adaptation, nominal vs off (nothing to adapt to)
    let nom = Scenario::default_step(20.0);
    let cmp2 = compare_adaptation(&nom);
    let on = cmp2.on.metrics.as_ref().unwrap();
    let off = cmp2.off.metrics.as_ref().unwrap();
    println!(
        "nominal paired: sse on {:.5} off {:.5} deg, settle on {:?} off {:?}",
        on.steady_state_error_rad.to_degrees(),
        off.steady_state_error_rad.to_degrees(),
        on.settling_time_s,
        off.settling_time_s
    );
}
