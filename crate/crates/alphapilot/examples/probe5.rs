// scratch probe: trace dumps for the accel path
use alphapilot::profile::AlphaProfile;
use alphapilot::scenario::{CommandSource, Scenario};
use alphapilot::sim::run_scenario;

fn main() {
    // small acceleration command
    for accel in [10.0, 15.0] {
        let mut acc = Scenario::default_step(0.0);
        acc.command = CommandSource::AccelStep { magnitude: accel, time: 0.1, ramp: 1.0 };
        acc.controller.shaping.natural_freq = 150.0;
        acc.controller.alpha_cmd_limit = 35.0_f64.to_radians();
        acc.t_final = 4.0;
        let out = run_scenario(&acc);
        let tail: Vec<f64> = out
            .telemetry
            .iter()
            .filter(|r| r.t > 3.5)
            .map(|r| r.accel_normal)
            .collect();
        let mean_az = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
        let sd_az = (tail.iter().map(|a| (a - mean_az) * (a - mean_az)).sum::<f64>()
            / tail.len().max(1) as f64)
            .sqrt();
        println!(
            "accel {accel}: abort {:?} az tail {:.2} +/- {:.3}",
            out.abort.map(|e| e.to_string()),
            mean_az,
            sd_az
        );
    }

    // blend trace dump around the largest command jump
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
        accel: 10.0,
    };
    blend.heading_reversal = 25.0_f64.to_radians();
    blend.turn_exit_alpha = 15.0_f64.to_radians();
    blend.controller.alpha_cmd_limit = 35.0_f64.to_radians();
    blend.controller.shaping.natural_freq = 150.0;
    blend.t_final = 5.0;
    let out = run_scenario(&blend);
    let tel = &out.telemetry;
    let (mut kmax, mut jmax) = (0, 0.0_f64);
    for (k, w) in tel.windows(2).enumerate() {
        let j = (w[1].alpha_cmd_raw - w[0].alpha_cmd_raw).abs();
        if j > jmax {
            jmax = j;
            kmax = k;
        }
    }
    println!(
        "blend accel=10: abort {:?}, max jump {:.4} deg at t={:.3}",
        out.abort.as_ref().map(|e| e.to_string()),
        jmax.to_degrees(),
        tel[kmax].t
    );
    for k in kmax.saturating_sub(3)..(kmax + 4).min(tel.len()) {
        let r = &tel[k];
        println!(
            "  t={:.3} raw={:7.3} lam={:.3} alpha={:7.3} az={:8.2} fin={:6.2}",
            r.t,
            r.alpha_cmd_raw.to_degrees(),
            r.lambda,
            r.alpha.to_degrees(),
            r.accel_normal,
            r.fin.to_degrees()
        );
    }
    let last = tel.last().unwrap();
    println!(
        "  final: az {:.2} (cmd 10) alpha {:.2} V {:.0}",
        last.accel_normal,
        last.alpha.to_degrees(),
        last.speed
    );
}
