//! Telemetry records and the CSV channel contract.

use std::io::Write;

use crate::error::{SimError, SimResult};

/// One record per simulation step. Angles in radians, speeds in m/s,
/// accelerations in m/s^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelemetryRecord {
    pub t: f64,
    pub u: f64,
    pub w: f64,
    pub q: f64,
    pub alpha: f64,
    pub speed: f64,
    pub mach: f64,
    pub dynamic_pressure: f64,
    pub alpha_cmd_raw: f64,
    pub alpha_cmd_shaped: f64,
    pub z1: f64,
    pub z2: f64,
    pub delta1_true: f64,
    pub delta2_true: f64,
    pub delta1_hat: f64,
    pub delta2_hat: f64,
    pub x2d: f64,
    pub fin_cmd: f64,
    pub fin: f64,
    pub accel_normal: f64,
    pub lambda: f64,
}

/// Fixed channel order of the output CSV.
pub const CSV_HEADER: &str = "t,u,w,q,alpha,V,mach,qbar,alpha_cmd_raw,alpha_cmd_shaped,\
z1,z2,delta1_true,delta2_true,delta1_hat,delta2_hat,x2d,fin_cmd,fin,az,lambda";

impl TelemetryRecord {
    fn channels(&self) -> [f64; 21] {
        [
            self.t,
            self.u,
            self.w,
            self.q,
            self.alpha,
            self.speed,
            self.mach,
            self.dynamic_pressure,
            self.alpha_cmd_raw,
            self.alpha_cmd_shaped,
            self.z1,
            self.z2,
            self.delta1_true,
            self.delta2_true,
            self.delta1_hat,
            self.delta2_hat,
            self.x2d,
            self.fin_cmd,
            self.fin,
            self.accel_normal,
            self.lambda,
        ]
    }
}

/// Write the telemetry series as CSV: one header row, then one row per
/// record with every float printed to nine significant digits.
pub fn write_csv<W: Write>(records: &[TelemetryRecord], mut out: W) -> SimResult<()> {
    let io_err = |source| SimError::Io { path: "<telemetry>".into(), source };
    writeln!(out, "{CSV_HEADER}").map_err(io_err)?;
    let mut line = String::with_capacity(21 * 18);
    for rec in records {
        line.clear();
        for (i, v) in rec.channels().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{v:.8e}"));
        }
        writeln!(out, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Render to an in-memory string (used by the comparison tooling and the
/// browser demo).
pub fn to_csv_string(records: &[TelemetryRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("telemetry is ascii")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> TelemetryRecord {
        TelemetryRecord {
            t: 0.001,
            u: 249.9,
            w: 1.25,
            q: 0.01,
            alpha: 0.005,
            speed: 249.903,
            mach: 0.7515,
            dynamic_pressure: 31_450.0,
            alpha_cmd_raw: 0.349,
            alpha_cmd_shaped: 0.0,
            z1: 0.005,
            z2: 0.01,
            delta1_true: -0.02,
            delta2_true: 1.5,
            delta1_hat: 0.0,
            delta2_hat: 0.0,
            x2d: -0.1,
            fin_cmd: 0.2,
            fin: 0.18,
            accel_normal: 12.0,
            lambda: 0.0,
        }
    }

    #[test]
    fn header_matches_channel_count() {
        assert_eq!(CSV_HEADER.split(',').count(), 21);
        assert_eq!(record().channels().len(), 21);
    }

    #[test]
    fn csv_is_deterministic() {
        let recs = vec![record(), record()];
        assert_eq!(to_csv_string(&recs), to_csv_string(&recs));
        let text = to_csv_string(&recs);
        assert!(text.starts_with("t,u,w,q,alpha,V,"));
        assert_eq!(text.lines().count(), 3);
        // nine significant digits
        assert!(text.contains("2.49900000e2"));
    }
}
