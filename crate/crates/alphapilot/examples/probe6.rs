// scratch probe: accel loop trace
use alphapilot::scenario::{CommandSource, Scenario};
use alphapilot::sim::run_scenario;

fn main() {
    let mut acc = Scenario::default_step(0.0);
    acc.command = CommandSource::AccelStep { magnitude: 15.0, time: 0.1, ramp: 2.0 };
    acc.controller.shaping.natural_freq = 20.0;
    acc.controller.alpha_cmd_limit = 25.0_f64.to_radians();
    acc.t_final = 6.0;
    let out = run_scenario(&acc);
    println!("abort {:?}", out.abort.as_ref().map(|e| e.to_string()));
    for r in out.telemetry.iter().step_by(100) {
        println!(
            "t={:5.2} raw_cmd={:7.2} alpha={:7.2} az={:8.2} fin={:6.2} V={:5.0} z1={:7.3}",
            r.t,
            r.alpha_cmd_raw.to_degrees(),
            r.alpha.to_degrees(),
            r.accel_normal,
            r.fin.to_degrees(),
            r.speed,
            r.z1.to_degrees()
        );
    }
}
