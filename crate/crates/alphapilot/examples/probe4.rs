// scratch probe: accel + blend with faster shaping
use alphapilot::profile::AlphaProfile;
use alphapilot::scenario::{CommandSource, Scenario};
use alphapilot::sim::run_scenario;

fn main() {
    for (accel, tf) in [(30.0, 4.0), (40.0, 5.0), (60.0, 2.4)] {
        let mut acc = Scenario::default_step(0.0);
        acc.command = CommandSource::AccelStep { magnitude: accel, time: 0.1, ramp: 1.0 };
        acc.controller.shaping.natural_freq = 150.0;
        acc.controller.alpha_cmd_limit = 35.0_f64.to_radians();
        acc.t_final = tf;
        let out = run_scenario(&acc);
        let tail: Vec<f64> = out
            .telemetry
            .iter()
            .filter(|r| r.t > tf - 0.4)
            .map(|r| r.accel_normal)
            .collect();
        let mean_az = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
        let sd_az = (tail.iter().map(|a| (a - mean_az) * (a - mean_az)).sum::<f64>()
            / tail.len().max(1) as f64)
            .sqrt();
        let last = out.telemetry.last().unwrap();
        println!(
            "accel {accel} tf {tf}: abort {:?} az tail {:.2} +/- {:.2} alpha {:.1} deg V {:.0}",
            out.abort.map(|e| e.to_string()),
            mean_az,
            sd_az,
            last.alpha.to_degrees(),
            last.speed
        );
    }

    // blend with reachable reversal threshold
    let samples: Vec<(f64, f64)> = (0..=300)
        .map(|k| {
            let t = 2.0 * k as f64 / 300.0;
            let s = (std::f64::consts::PI * t / 2.0).sin();
            (t, 45.0_f64.to_radians() * s * s)
        })
        .collect();
    let mut blend = Scenario::default_step(0.0);
    blend.command = CommandSource::TurnThenAccel {
        profile: AlphaProfile::new(samples.clone()).unwrap(),
        accel: 30.0,
    };
    blend.heading_reversal = 25.0_f64.to_radians();
    blend.turn_exit_alpha = 15.0_f64.to_radians();
    blend.controller.alpha_cmd_limit = 35.0_f64.to_radians();
    blend.controller.shaping.natural_freq = 150.0;
    blend.t_final = 5.0;
    let out = run_scenario(&blend);
    let tel = &out.telemetry;
    let trigger_idx = tel.iter().position(|r| r.lambda > 0.0);
    println!(
        "blend: abort {:?} trigger {:?} reversal {:?}",
        out.abort.as_ref().map(|e| e.to_string()),
        trigger_idx.map(|i| tel[i].t),
        out.metrics.as_ref().unwrap().heading_reversal_time_s
    );
    if let Some(i0) = trigger_idx {
        let lo = i0.saturating_sub(60);
        let hi = (i0 + 260).min(tel.len() - 1);
        let max_jump_near = tel[lo..hi]
            .windows(2)
            .map(|w| (w[1].alpha_cmd_raw - w[0].alpha_cmd_raw).abs())
            .fold(0.0_f64, f64::max);
        let last = tel.last().unwrap();
        println!(
            "blend: jump through handover {:.4} deg, final az {:.2} (cmd 30) alpha {:.1} V {:.0}",
            max_jump_near.to_degrees(),
            last.accel_normal,
            last.alpha.to_degrees(),
            last.speed
        );
    }
}
