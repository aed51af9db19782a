//! Threshold sweeps over excess noise and their on-disk CSV format.
//!
//! Format, version 1:
//!
//! ```text
//! # cvqkd-thresholds v1 va=<value>
//! delta,eta_clone,eta_anticlone,eta_bma,eta_opt,eta_intercept_resend
//! <data rows, ascending delta>
//! ```
//!
//! LF line endings, no trailing whitespace. Every number is written in its
//! shortest decimal form that parses back to the identical binary value.

use crate::attacks::{threshold_curve, ThresholdCurve, ThresholdRow};
use crate::error::{Error, Result};

pub const CSV_MAGIC: &str = "# cvqkd-thresholds v1 va=";
pub const CSV_HEADER: &str = "delta,eta_clone,eta_anticlone,eta_bma,eta_opt,eta_intercept_resend";

/// A uniform δ grid for a threshold sweep at fixed modulation variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub v_a: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(v_a: f64, delta_min: f64, delta_max: f64, steps: usize) -> Result<Self> {
        if !v_a.is_finite() || v_a <= 0.0 {
            return Err(Error::NonPositiveModulation(v_a));
        }
        if !(delta_min.is_finite() && delta_max.is_finite()) || delta_min < 0.0 || delta_min >= delta_max {
            return Err(Error::BadSweepRange { min: delta_min, max: delta_max });
        }
        if steps < 2 {
            return Err(Error::TooFewSteps(steps));
        }
        Ok(Self { v_a, delta_min, delta_max, steps })
    }

    /// `steps` equally spaced values from `delta_min` to `delta_max`
    /// inclusive.
    pub fn delta_grid(&self) -> Vec<f64> {
        let span = self.delta_max - self.delta_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| self.delta_min + span * k as f64 / last)
            .collect()
    }

    pub fn run(&self) -> ThresholdCurve {
        threshold_curve(self.v_a, &self.delta_grid())
    }
}

fn fmt(buf: &mut ryu::Buffer, value: f64) -> String {
    buf.format(value).to_owned()
}

/// Serializes a curve in the v1 CSV format.
pub fn write_csv(curve: &ThresholdCurve) -> String {
    let mut buf = ryu::Buffer::new();
    let mut out = String::new();
    out.push_str(CSV_MAGIC);
    out.push_str(&fmt(&mut buf, curve.v_a));
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &curve.rows {
        for (i, value) in [
            row.delta,
            row.eta_clone,
            row.eta_anticlone,
            row.eta_bma,
            row.eta_opt,
            row.eta_intercept_resend,
        ]
        .into_iter()
        .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            out.push_str(buf.format(value));
        }
        out.push('\n');
    }
    out
}

/// Parse failure with the first offending 1-based line number.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

fn csv_err(line: usize, message: impl Into<String>) -> CsvError {
    CsvError { line, message: message.into() }
}

/// Parses the v1 CSV format back into a curve.
pub fn parse_csv(text: &str) -> std::result::Result<ThresholdCurve, CsvError> {
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines
        .next()
        .ok_or_else(|| csv_err(1, "empty file, expected threshold CSV"))?;
    let va_text = magic
        .strip_prefix(CSV_MAGIC)
        .ok_or_else(|| csv_err(1, format!("expected `{CSV_MAGIC}<value>`")))?;
    let v_a: f64 = va_text
        .trim()
        .parse()
        .map_err(|_| csv_err(1, format!("bad modulation variance `{va_text}`")))?;

    let (_, header) = lines.next().ok_or_else(|| csv_err(2, "missing column header"))?;
    if header != CSV_HEADER {
        return Err(csv_err(2, format!("expected header `{CSV_HEADER}`")));
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            return Err(csv_err(line_no, "blank line inside data section"));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(csv_err(line_no, format!("expected 6 columns, found {}", fields.len())));
        }
        let mut values = [0.0_f64; 6];
        for (value, field) in values.iter_mut().zip(&fields) {
            *value = field
                .parse()
                .map_err(|_| csv_err(line_no, format!("bad number `{field}`")))?;
        }
        rows.push(ThresholdRow {
            delta: values[0],
            eta_clone: values[1],
            eta_anticlone: values[2],
            eta_bma: values[3],
            eta_opt: values[4],
            eta_intercept_resend: values[5],
        });
    }
    if rows.is_empty() {
        return Err(csv_err(3, "no data rows"));
    }
    Ok(ThresholdCurve { v_a, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(10.0, 0.0, 0.6, 61).is_ok());
        assert!(matches!(SweepSpec::new(10.0, 0.3, 0.3, 5), Err(Error::BadSweepRange { .. })));
        assert!(matches!(SweepSpec::new(10.0, -0.1, 0.3, 5), Err(Error::BadSweepRange { .. })));
        assert!(matches!(SweepSpec::new(10.0, 0.0, 0.3, 1), Err(Error::TooFewSteps(1))));
        assert!(matches!(SweepSpec::new(0.0, 0.0, 0.3, 5), Err(Error::NonPositiveModulation(_))));
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let spec = SweepSpec::new(10.0, 0.0, 0.6, 61).unwrap();
        let grid = spec.delta_grid();
        assert_eq!(grid.len(), 61);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[60], 0.6);
        assert_relative_eq!(grid[1], 0.01, epsilon = 1e-15);
    }

    #[test]
    fn csv_round_trips() {
        let curve = SweepSpec::new(10.0, 0.0, 0.5, 6).unwrap().run();
        let text = write_csv(&curve);
        assert!(text.starts_with("# cvqkd-thresholds v1 va=10.0\n"));
        assert!(text.ends_with('\n'));
        assert!(!text.contains(" \n"));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, curve);
    }

    #[test]
    fn csv_rows_ascend_in_delta() {
        let curve = SweepSpec::new(10.0, 0.1, 0.4, 4).unwrap().run();
        let text = write_csv(&curve);
        let deltas: Vec<f64> = text
            .lines()
            .skip(2)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        let mut sorted = deltas.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(deltas, sorted);
    }

    #[test]
    fn parse_reports_first_offending_line() {
        assert_eq!(parse_csv("").unwrap_err().line, 1);
        assert_eq!(parse_csv("garbage\n").unwrap_err().line, 1);
        let header_only = format!("{CSV_MAGIC}10.0\n{CSV_HEADER}\n");
        assert_eq!(parse_csv(&header_only).unwrap_err().line, 3);
        let bad_field = format!("{CSV_MAGIC}10.0\n{CSV_HEADER}\n0.1,a,0,0,0,0\n");
        assert_eq!(parse_csv(&bad_field).unwrap_err().line, 3);
        let bad_arity = format!("{CSV_MAGIC}10.0\n{CSV_HEADER}\n0.1,0,0\n");
        assert_eq!(parse_csv(&bad_arity).unwrap_err().line, 3);
        let second_row_bad = format!("{CSV_MAGIC}10.0\n{CSV_HEADER}\n0,0,0,0,0,0\nnope\n");
        assert_eq!(parse_csv(&second_row_bad).unwrap_err().line, 4);
    }

    #[test]
    fn nonfinite_thresholds_survive_the_round_trip() {
        // A Bell-measurement threshold can be infinite (modulation below the
        // excess noise); the format must carry it.
        let curve = threshold_curve(0.1, &[0.5]);
        assert!(curve.rows[0].eta_bma.is_infinite());
        let back = parse_csv(&write_csv(&curve)).unwrap();
        assert!(back.rows[0].eta_bma.is_infinite());
    }
}
