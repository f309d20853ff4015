//! Angle-of-attack reference profiles loaded from two-column CSV files
//! (`t_seconds, alpha_deg`, header row optional).

use std::path::Path;

use crate::error::{SimError, SimResult};

/// Time-indexed alpha command with linear interpolation between samples
/// and constant extrapolation beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaProfile {
    /// (time [s], alpha [rad]) samples, strictly increasing in time.
    samples: Vec<(f64, f64)>,
}

impl AlphaProfile {
    pub fn new(samples: Vec<(f64, f64)>) -> SimResult<Self> {
        if samples.is_empty() {
            return Err(SimError::Config("alpha profile has no samples".into()));
        }
        if samples.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(SimError::Config(
                "alpha profile times must be strictly increasing".into(),
            ));
        }
        Ok(Self { samples })
    }

    pub fn from_csv_str(text: &str) -> SimResult<Self> {
        let mut samples = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
                return Err(SimError::ProfileParse {
                    line: line_no,
                    msg: "expected two comma-separated columns".into(),
                });
            };
            if fields.next().is_some() {
                return Err(SimError::ProfileParse {
                    line: line_no,
                    msg: "more than two columns".into(),
                });
            }
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(t), Ok(alpha_deg)) => {
                    if let Some(&(prev, _)) = samples.last() {
                        if t <= prev {
                            return Err(SimError::ProfileParse {
                                line: line_no,
                                msg: format!("time {t} not after previous sample {prev}"),
                            });
                        }
                    }
                    samples.push((t, alpha_deg.to_radians()));
                }
                _ if idx == 0 => continue, // header row
                _ => {
                    return Err(SimError::ProfileParse {
                        line: line_no,
                        msg: format!("cannot parse '{line}' as two numbers"),
                    });
                }
            }
        }
        Self::new(samples)
    }

    pub fn from_path(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    /// Commanded alpha at time `t` [rad].
    pub fn command(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        if t >= s[s.len() - 1].0 {
            return s[s.len() - 1].1;
        }
        let i = s.partition_point(|&(ts, _)| ts <= t) - 1;
        let (t0, a0) = s[i];
        let (t1, a1) = s[i + 1];
        a0 + (t - t0) / (t1 - t0) * (a1 - a0)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Duration covered by the samples [s].
    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }
}

/// Smooth synthetic turn profile: alpha rises 0 -> 60 deg -> 0 over two
/// seconds following sin^2, sampled densely enough that the piecewise
/// linear interpolation stays within a small fraction of a degree of the
/// underlying curve.
pub fn synthetic_agile_profile() -> AlphaProfile {
    let n = 200;
    let samples = (0..=n)
        .map(|k| {
            let t = 2.0 * k as f64 / n as f64;
            let s = (std::f64::consts::PI * t / 2.0).sin();
            (t, (60.0 * s * s).to_radians())
        })
        .collect();
    AlphaProfile::new(samples).expect("synthetic profile is well formed")
}

/// Render a profile to the CSV schema.
pub fn profile_to_csv(profile: &AlphaProfile) -> String {
    let mut out = String::from("t_seconds,alpha_deg\n");
    for &(t, alpha) in profile.samples() {
        out.push_str(&format!("{:.6},{:.6}\n", t, alpha.to_degrees()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_interpolation() {
        let p = AlphaProfile::from_csv_str("0,0\n1,10\n").unwrap();
        assert!((p.command(0.5).to_degrees() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constant_extrapolation_and_single_sample() {
        let p = AlphaProfile::from_csv_str("0,0\n1,10\n").unwrap();
        assert!((p.command(5.0).to_degrees() - 10.0).abs() < 1e-12);
        assert!((p.command(-1.0).to_degrees() - 0.0).abs() < 1e-12);

        let single = AlphaProfile::from_csv_str("2.0,7.5\n").unwrap();
        assert!((single.command(0.0).to_degrees() - 7.5).abs() < 1e-12);
        assert!((single.command(99.0).to_degrees() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn header_row_is_skipped() {
        let p = AlphaProfile::from_csv_str("t_seconds,alpha_deg\n0,0\n2,20\n").unwrap();
        assert_eq!(p.samples().len(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = AlphaProfile::from_csv_str("0,0\nbogus,row\n").unwrap_err();
        match err {
            SimError::ProfileParse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }

        let err = AlphaProfile::from_csv_str("0,0\n2,5\n1,7\n").unwrap_err();
        match err {
            SimError::ProfileParse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }

        let err = AlphaProfile::from_csv_str("0,0\n1,2,3\n").unwrap_err();
        assert!(matches!(err, SimError::ProfileParse { line: 2, .. }));
    }

    #[test]
    fn synthetic_profile_shape() {
        let p = synthetic_agile_profile();
        assert!((p.command(0.0)).abs() < 1e-12);
        assert!((p.command(1.0).to_degrees() - 60.0).abs() < 1e-6);
        assert!((p.command(2.0)).abs() < 1e-9);
        assert!((p.end_time() - 2.0).abs() < 1e-12);
        // round trip through the CSV schema
        let again = AlphaProfile::from_csv_str(&profile_to_csv(&p)).unwrap();
        for k in 0..=20 {
            let t = 0.1 * k as f64;
            assert!((again.command(t) - p.command(t)).abs() < 1e-6);
        }
    }
}
