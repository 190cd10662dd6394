//! Residual reports and their canonical JSON / CSV encodings.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::kernels::OrderParams;

/// How residuals are compared with the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `max(residuals) <= threshold`.
    #[default]
    AtMost,
    /// Pass iff `max(residuals) >= threshold`; used for controls that must be rejected.
    AtLeast,
}

/// Per-point relative residuals of one check for one `(n, k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub params: OrderParams,
    pub grid: Vec<f64>,
    pub residuals: Vec<f64>,
    pub threshold: f64,
    #[serde(default)]
    pub comparison: Comparison,
    pub pass: bool,
}

/// Largest residual, with NaN treated as infinite.
fn max_residual(residuals: &[f64]) -> Option<f64> {
    residuals
        .iter()
        .map(|r| if r.is_nan() { f64::INFINITY } else { *r })
        .reduce(f64::max)
}

impl ResidualReport {
    pub fn new(check: impl Into<String>, params: OrderParams, grid: Vec<f64>, residuals: Vec<f64>, threshold: f64) -> Self {
        Self::with_comparison(check, params, grid, residuals, threshold, Comparison::AtMost)
    }

    pub fn with_comparison(
        check: impl Into<String>,
        params: OrderParams,
        grid: Vec<f64>,
        residuals: Vec<f64>,
        threshold: f64,
        comparison: Comparison,
    ) -> Self {
        debug_assert_eq!(grid.len(), residuals.len());
        let mut r = ResidualReport {
            check: check.into(),
            params,
            grid,
            residuals,
            threshold,
            comparison,
            pass: false,
        };
        r.pass = r.evaluate_pass();
        r
    }

    /// A report for a check that could not be evaluated at all.
    pub fn errored(check: impl Into<String>, params: OrderParams, threshold: f64) -> Self {
        Self::new(check, params, vec![f64::NAN], vec![f64::NAN], threshold)
    }

    fn evaluate_pass(&self) -> bool {
        match (max_residual(&self.residuals), self.comparison) {
            (None, _) => true,
            (Some(m), Comparison::AtMost) => m <= self.threshold,
            (Some(m), Comparison::AtLeast) => m.is_finite() && m >= self.threshold,
        }
    }

    pub fn max_residual(&self) -> f64 {
        max_residual(&self.residuals).unwrap_or(0.0)
    }

    /// Re-judge against a different threshold.
    pub fn rethreshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = self.evaluate_pass();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Stable ordering key: check name, then `n`, then `k`.
    pub fn sort_key(&self) -> (String, u32, u64) {
        (self.check.clone(), self.params.n, self.params.k.to_bits())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "check": self.check,
            "params": {"n": self.params.n, "k": self.params.k},
            "grid": self.grid,
            "residuals": self.residuals,
            "threshold": self.threshold,
            "comparison": self.comparison,
            "pass": self.pass,
        })
    }
}

pub fn sort_reports(reports: &mut [ResidualReport]) {
    reports.sort_by(|a, b| {
        a.check
            .cmp(&b.check)
            .then(a.params.n.cmp(&b.params.n))
            .then(a.params.k.total_cmp(&b.params.k))
    });
}

/// Float with 17 significant digits; non-finite values become `null`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_canonical(v: &Value, out: &mut String, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = num.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                out.push_str(&fmt_f64(num.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string encoding")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // numeric arrays stay on one line
            let flat = items.iter().all(|i| !i.is_object() && !i.is_array())
                || items.iter().all(|i| i.as_array().is_some_and(|a| a.iter().all(Value::is_number)));
            out.push('[');
            for (j, item) in items.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                if flat {
                    if j > 0 {
                        out.push(' ');
                    }
                } else {
                    out.push('\n');
                    pad(out, indent + 2);
                }
                write_canonical(item, out, indent + 2);
            }
            if !flat {
                out.push('\n');
                pad(out, indent);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (j, key) in keys.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push('\n');
                pad(out, indent + 2);
                out.push_str(&serde_json::to_string(key).expect("key encoding"));
                out.push_str(": ");
                write_canonical(&map[*key], out, indent + 2);
            }
            out.push('\n');
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Deterministic JSON: sorted keys, two-space indentation, floats with 17
/// significant digits, trailing newline.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out, 0);
    out.push('\n');
    out
}

pub const CSV_HEADER: &str = "check,n,k,x,residual,threshold,pass";

/// One CSV row per grid point of every report.
pub fn reports_to_csv(reports: &[ResidualReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        for (x, res) in r.grid.iter().zip(&r.residuals) {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.check,
                r.params.n,
                fmt_f64(r.params.k),
                fmt_f64(*x),
                fmt_f64(*res),
                fmt_f64(r.threshold),
                r.pass
            )
            .unwrap();
        }
    }
    out
}

pub fn reports_to_value(reports: &[ResidualReport]) -> Value {
    let mut m = Map::new();
    m.insert("reports".into(), Value::Array(reports.iter().map(ResidualReport::to_value).collect()));
    Value::Object(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format {other:?} (expected json or csv)"))),
        }
    }
}

/// Write text to `path`, attaching the path to any I/O error.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Serialize a set of reports in the requested format.
pub fn export(reports: &[ResidualReport], format: Format, path: &Path) -> Result<()> {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let text = match format {
        Format::Json => to_canonical_json(&reports_to_value(&sorted)),
        Format::Csv => reports_to_csv(&sorted),
    };
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> OrderParams {
        OrderParams::new(2, 0.5).unwrap()
    }

    #[test]
    fn pass_follows_threshold() {
        let r = ResidualReport::new("x", params(), vec![1.0, 2.0], vec![1e-9, 1e-7], 1e-6);
        assert!(r.pass);
        assert!(!r.clone().rethreshold(1e-8).pass);
        let nan = ResidualReport::new("x", params(), vec![1.0], vec![f64::NAN], 1e-6);
        assert!(!nan.pass);
        let empty = ResidualReport::new("x", params(), vec![], vec![], 1e-6);
        assert!(empty.pass);
        let ctrl = ResidualReport::with_comparison("c", params(), vec![1.0, 2.0], vec![0.05, 0.3], 0.1, Comparison::AtLeast);
        assert!(ctrl.pass);
    }

    #[test]
    fn canonical_json_sorts_keys_and_fixes_digits() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {"z": true, "y": null}});
        let s = to_canonical_json(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1, 2.5000000000000000e0],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let r = ResidualReport::new("identity", params(), vec![0.5, 1.0], vec![1e-9, 2e-9], 1e-6);
        let csv = reports_to_csv(&[r]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("identity,2,5.0000000000000000e-1,5.0000000000000000e-1,"));
        assert!(reports_to_csv(&[]).lines().count() == 1);
    }
}
