//! Continuous-time checks of the sifting functions, independent of the
//! sampled engine: exact extrema by root finding, interpolants through
//! analytically placed knots, and projections by adaptive quadrature.

pub mod common;
pub mod lagrange;
pub mod lemmas;
pub mod perturbation;
pub mod rational;
pub mod theorem3;

use std::fmt::Write as _;

use crate::error::{EmdError, Result};

/// Least-squares fit of `log y = log c + slope * log x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    pub log_log_slope: f64,
    /// `c` in `y ≈ c * x^slope`.
    pub leading_coefficient: f64,
    pub r_squared: f64,
}

impl ScalingFit {
    /// Fits `|y|` against `x`. Requires at least two strictly increasing,
    /// positive `x` values and nonzero `y` values.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(EmdError::LengthMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(EmdError::InvalidConfig(
                "scaling fit needs at least two points".into(),
            ));
        }
        if x.iter().any(|&v| !(v > 0.0)) || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EmdError::InvalidConfig(
                "scaling fit needs positive increasing x".into(),
            ));
        }
        if y.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(EmdError::InvalidConfig(
                "scaling fit needs finite nonzero y".into(),
            ));
        }
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
        let n = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
        let syy: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r_squared = if syy == 0.0 {
            1.0
        } else {
            (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
        };
        Ok(Self {
            x_values: x.to_vec(),
            y_values: y.to_vec(),
            log_log_slope: slope,
            leading_coefficient: intercept.exp(),
            r_squared,
        })
    }

    /// `x,y` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in self.x_values.iter().zip(&self.y_values) {
            let _ = writeln!(out, "{x:.16e},{y:.16e}");
        }
        out
    }
}

/// One computed constant against its reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEntry {
    pub label: String,
    pub computed: f64,
    pub paper_value: f64,
    pub rel_error: f64,
    /// Relative tolerance when the entry is asserted; `None` for recorded-only entries.
    pub tolerance: Option<f64>,
}

impl ConstantEntry {
    pub fn passes(&self) -> bool {
        self.tolerance.map_or(true, |tol| self.rel_error <= tol)
    }
}

/// Named constants in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstantsReport {
    pub entries: Vec<ConstantEntry>,
    /// Free-form `key=value` notes (interpretations, cross-checks).
    pub notes: Vec<(String, String)>,
}

impl ConstantsReport {
    pub fn push(&mut self, label: &str, computed: f64, paper_value: f64, tolerance: Option<f64>) {
        let rel_error = if paper_value == 0.0 {
            computed.abs()
        } else {
            (computed - paper_value).abs() / paper_value.abs()
        };
        self.entries.push(ConstantEntry {
            label: label.to_string(),
            computed,
            paper_value,
            rel_error,
            tolerance,
        });
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, label: &str) -> Option<&ConstantEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Computed value for `label`. Panics if absent.
    pub fn value(&self, label: &str) -> f64 {
        self.get(label)
            .unwrap_or_else(|| panic!("no constant `{label}`"))
            .computed
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(ConstantEntry::passes)
    }

    /// `label,computed,reference,rel_error,tolerance,status`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,computed,reference,rel_error,tolerance,status\n");
        for e in &self.entries {
            let tol = e.tolerance.map_or(String::new(), |t| format!("{t}"));
            let status = match e.tolerance {
                None => "recorded",
                Some(_) if e.passes() => "pass",
                Some(_) => "FAIL",
            };
            let _ = writeln!(
                out,
                "{},{:.10e},{:.10e},{:.4e},{},{}",
                e.label, e.computed, e.paper_value, e.rel_error, tol, status
            );
        }
        out
    }

    /// Aligned human-readable table.
    pub fn table(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.label.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = format!(
            "{:<width$}  {:>14}  {:>14}  {:>9}  status\n",
            "label", "computed", "reference", "rel_err"
        );
        for e in &self.entries {
            let status = match e.tolerance {
                None => "recorded".to_string(),
                Some(t) if e.passes() => format!("pass (tol {t})"),
                Some(t) => format!("FAIL (tol {t})"),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>14.6}  {:>14.6}  {:>9.2e}  {}",
                e.label, e.computed, e.paper_value, e.rel_error, status
            );
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_power_law() {
        let x = [1e-3, 2e-3, 5e-3, 1e-2];
        let y: Vec<f64> = x.iter().map(|v| 7.0 * v * v * v).collect();
        let f = ScalingFit::fit(&x, &y).unwrap();
        assert!((f.log_log_slope - 3.0).abs() < 1e-12);
        assert!((f.leading_coefficient - 7.0).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(ScalingFit::fit(&[2.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn constants_report_errors() {
        let mut r = ConstantsReport::default();
        r.push("a", 1.02, 1.0, Some(0.05));
        r.push("b", 2.0, 1.0, None);
        r.push("c", 1.2, 1.0, Some(0.1));
        assert!((r.get("a").unwrap().rel_error - 0.02).abs() < 1e-12);
        assert!(r.get("b").unwrap().passes());
        assert!(!r.all_pass());
        assert!(r.to_csv().contains("c,"));
    }
}
