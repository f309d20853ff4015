//! Deterministic scenario metrics.
//!
//! Definitions (all computed from the logged telemetry):
//!
//! * step detection: the raw alpha command's first change from its
//!   initial value marks the step time; the step size is final minus
//!   initial raw command. Runs whose raw command never changes have no
//!   step metrics (reported as `n/a`, never NaN).
//! * `rise_time_s`: time for the response to pass from 10% to 90% of the
//!   step, measured from the initial value toward the final command.
//! * `settling_time_s`: last time the tracking error against the final
//!   command exceeds 2% of the step size, measured from the step time;
//!   `n/a` if the response is still outside the band at the end.
//! * `overshoot_pct`: peak excursion beyond the final command in the
//!   step direction, as a percentage of the step size.
//! * `steady_state_error_rad`: mean |alpha - raw command| over the last
//!   10% of the run.
//! * `peak_tracking_error_rad`: max |alpha - raw command| over the run.
//! * `rms_delta*_est_err`: RMS of (estimate - truth) for the two lumped
//!   uncertainty channels.
//! * `heading_reversal_time_s`: first time the velocity-vector heading
//!   has swept the configured reversal angle; `n/a` when it never does.

use crate::telemetry::TelemetryRecord;

/// Scenario outcome summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub final_time_s: f64,
    pub rise_time_s: Option<f64>,
    pub settling_time_s: Option<f64>,
    pub overshoot_pct: Option<f64>,
    pub steady_state_error_rad: f64,
    pub peak_tracking_error_rad: f64,
    pub peak_fin_rad: f64,
    pub peak_fin_rate_rads: f64,
    pub peak_fin_cmd_rad: f64,
    pub rms_delta1_est_err: f64,
    pub rms_delta2_est_err: f64,
    pub heading_reversal_time_s: Option<f64>,
}

/// Channels the telemetry does not carry but the metrics need.
#[derive(Debug, Clone, Copy, Default)]
pub struct MetricsAux {
    /// Peak |fin rate| the servo actually moved at [rad/s].
    pub peak_fin_rate_rads: f64,
    /// First time the heading swept the reversal threshold [s].
    pub heading_reversal_time_s: Option<f64>,
}

/// Compute the metric set from a telemetry series. `records` must be
/// non-empty.
pub fn compute_metrics(records: &[TelemetryRecord], aux: &MetricsAux) -> Metrics {
    assert!(!records.is_empty(), "metrics need at least one record");
    let final_time_s = records[records.len() - 1].t;

    // step detection on the raw command channel
    let cmd0 = records[0].alpha_cmd_raw;
    let target = records[records.len() - 1].alpha_cmd_raw;
    let step = target - cmd0;
    let step_idx = records.iter().position(|r| r.alpha_cmd_raw != cmd0);
    let is_step = step_idx.is_some() && step.abs() > 1e-12;

    let (mut rise, mut settle, mut overshoot) = (None, None, None);
    if is_step {
        let k0 = step_idx.unwrap();
        let t_step = records[k0].t;
        let sign = step.signum();

        let crossing = |frac: f64| {
            let level = cmd0 + frac * step;
            records[k0..]
                .iter()
                .find(|r| (r.alpha - level) * sign >= 0.0)
                .map(|r| r.t)
        };
        if let (Some(t10), Some(t90)) = (crossing(0.1), (crossing(0.9))) {
            rise = Some(t90 - t10);
        }

        let band = 0.02 * step.abs();
        let last_outside = records[k0..]
            .iter()
            .filter(|r| (r.alpha - target).abs() > band)
            .map(|r| r.t)
            .next_back();
        let settled_at_end = (records[records.len() - 1].alpha - target).abs() <= band;
        settle = match (last_outside, settled_at_end) {
            (_, false) => None,
            (None, true) => Some(0.0),
            (Some(t), true) => Some(t - t_step),
        };

        let peak_beyond = records[k0..]
            .iter()
            .map(|r| (r.alpha - target) * sign)
            .fold(0.0_f64, f64::max);
        overshoot = Some(100.0 * peak_beyond / step.abs());
    }

    let tail_start = records.len() - (records.len() / 10).max(1);
    let steady_state_error_rad = records[tail_start..]
        .iter()
        .map(|r| (r.alpha - r.alpha_cmd_raw).abs())
        .sum::<f64>()
        / (records.len() - tail_start) as f64;

    let peak_tracking_error_rad = records
        .iter()
        .map(|r| (r.alpha - r.alpha_cmd_raw).abs())
        .fold(0.0_f64, f64::max);

    let peak_fin_rad = records.iter().map(|r| r.fin.abs()).fold(0.0_f64, f64::max);
    let peak_fin_cmd_rad = records
        .iter()
        .map(|r| r.fin_cmd.abs())
        .fold(0.0_f64, f64::max);

    let n = records.len() as f64;
    let rms = |f: fn(&TelemetryRecord) -> f64| {
        (records.iter().map(|r| f(r) * f(r)).sum::<f64>() / n).sqrt()
    };
    let rms_delta1_est_err = rms(|r| r.delta1_hat - r.delta1_true);
    let rms_delta2_est_err = rms(|r| r.delta2_hat - r.delta2_true);

    Metrics {
        final_time_s,
        rise_time_s: rise,
        settling_time_s: settle,
        overshoot_pct: overshoot,
        steady_state_error_rad,
        peak_tracking_error_rad,
        peak_fin_rad,
        peak_fin_rate_rads: aux.peak_fin_rate_rads,
        peak_fin_cmd_rad,
        rms_delta1_est_err,
        rms_delta2_est_err,
        heading_reversal_time_s: aux.heading_reversal_time_s,
    }
}

impl Metrics {
    /// Flat `key = value` rendering; unavailable metrics print `n/a`.
    pub fn to_key_value(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map_or_else(|| "n/a".into(), |x| format!("{x:.9e}"))
        }
        let mut s = String::new();
        s.push_str(&format!("final_time_s = {:.9e}\n", self.final_time_s));
        s.push_str(&format!("rise_time_s = {}\n", opt(self.rise_time_s)));
        s.push_str(&format!("settling_time_s = {}\n", opt(self.settling_time_s)));
        s.push_str(&format!("overshoot_pct = {}\n", opt(self.overshoot_pct)));
        s.push_str(&format!(
            "steady_state_error_rad = {:.9e}\n",
            self.steady_state_error_rad
        ));
        s.push_str(&format!(
            "peak_tracking_error_rad = {:.9e}\n",
            self.peak_tracking_error_rad
        ));
        s.push_str(&format!("peak_fin_rad = {:.9e}\n", self.peak_fin_rad));
        s.push_str(&format!(
            "peak_fin_rate_rads = {:.9e}\n",
            self.peak_fin_rate_rads
        ));
        s.push_str(&format!("peak_fin_cmd_rad = {:.9e}\n", self.peak_fin_cmd_rad));
        s.push_str(&format!(
            "rms_delta1_est_err = {:.9e}\n",
            self.rms_delta1_est_err
        ));
        s.push_str(&format!(
            "rms_delta2_est_err = {:.9e}\n",
            self.rms_delta2_est_err
        ));
        s.push_str(&format!(
            "heading_reversal_time_s = {}\n",
            opt(self.heading_reversal_time_s)
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blank(t: f64) -> TelemetryRecord {
        TelemetryRecord {
            t,
            u: 250.0,
            w: 0.0,
            q: 0.0,
            alpha: 0.0,
            speed: 250.0,
            mach: 0.75,
            dynamic_pressure: 31_000.0,
            alpha_cmd_raw: 0.0,
            alpha_cmd_shaped: 0.0,
            z1: 0.0,
            z2: 0.0,
            delta1_true: 0.0,
            delta2_true: 0.0,
            delta1_hat: 0.0,
            delta2_hat: 0.0,
            x2d: 0.0,
            fin_cmd: 0.0,
            fin: 0.0,
            accel_normal: 0.0,
            lambda: 0.0,
        }
    }

    #[test]
    fn exponential_step_settling_matches_analytic_value() {
        // response 1 - exp(-25 (t - t_step)) to a unit step:
        // settling = ln(50)/25
        let dt = 1e-3;
        let mut recs = Vec::new();
        for k in 0..1000 {
            let t = k as f64 * dt;
            let mut r = blank(t);
            if k >= 1 {
                r.alpha_cmd_raw = 1.0;
                r.alpha = 1.0 - (-25.0 * (t - dt)).exp();
            }
            recs.push(r);
        }
        let m = compute_metrics(&recs, &MetricsAux::default());
        let analytic = 50.0_f64.ln() / 25.0;
        let settle = m.settling_time_s.unwrap();
        assert!(
            (settle - analytic).abs() <= dt + 1e-12,
            "settling {settle} vs {analytic}"
        );
        // monotone response: zero overshoot
        assert_eq!(m.overshoot_pct.unwrap(), 0.0);
        assert!(m.rise_time_s.unwrap() > 0.0);
    }

    #[test]
    fn constant_error_reported_as_steady_state() {
        let mut recs = Vec::new();
        for k in 0..500 {
            let mut r = blank(k as f64 * 1e-3);
            if k >= 1 {
                r.alpha_cmd_raw = 0.2;
            }
            r.alpha = if k >= 1 { 0.17 } else { 0.0 };
            recs.push(r);
        }
        let m = compute_metrics(&recs, &MetricsAux::default());
        assert!((m.steady_state_error_rad - 0.03).abs() < 1e-12);
        // 15% error never settles into the 2% band
        assert_eq!(m.settling_time_s, None);
    }

    #[test]
    fn zero_step_marks_metrics_not_applicable() {
        let recs: Vec<_> = (0..100).map(|k| blank(k as f64 * 1e-3)).collect();
        let m = compute_metrics(&recs, &MetricsAux::default());
        assert_eq!(m.rise_time_s, None);
        assert_eq!(m.settling_time_s, None);
        assert_eq!(m.overshoot_pct, None);
        let text = m.to_key_value();
        assert!(text.contains("rise_time_s = n/a"));
        assert!(!text.contains("NaN") && !text.contains("nan"));
    }
}
