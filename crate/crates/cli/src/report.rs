//! Experiment reports, file output and gnuplot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use emd_core::oracles::ConstantsReport;

use crate::CliError;

/// One named check. `asserted == false` marks a recorded-only observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub asserted: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub checks: Vec<Check>,
    /// `key=value` lines written to `metadata.txt`.
    pub metadata: Vec<(String, String)>,
    pub constants: Option<ConstantsReport>,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            ..Self::default()
        }
    }

    pub fn assert(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            asserted: true,
            detail: detail.into(),
        });
    }

    pub fn record(&mut self, name: &str, holds: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: holds,
            asserted: false,
            detail: detail.into(),
        });
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// Asserted checks and asserted constants all hold.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(|c| c.passed)
            && self
                .constants
                .as_ref()
                .map_or(true, ConstantsReport::all_pass)
    }

    /// Human-readable pass/fail table.
    pub fn summary(&self) -> String {
        let mut out = format!("experiment {}\n", self.id);
        for c in &self.checks {
            let status = match (c.asserted, c.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "note",
                (false, false) => "note (does not hold)",
            };
            let _ = writeln!(out, "  [{status}] {}: {}", c.name, c.detail);
        }
        if let Some(k) = &self.constants {
            out.push_str(&k.table());
        }
        let _ = writeln!(
            out,
            "result: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        out
    }

    pub fn metadata_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "{k}={v}");
        }
        for c in &self.checks {
            let kind = if c.asserted { "check" } else { "note" };
            let _ = writeln!(
                out,
                "{kind}.{}={} ({})",
                c.name.replace(' ', "_"),
                c.passed,
                c.detail
            );
        }
        out
    }
}

/// Writes `contents` to `dir/name`, creating `dir`, and returns the path.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    Ok(path)
}

/// One curve in a gnuplot panel.
#[derive(Debug, Clone)]
pub struct Curve {
    pub file: String,
    pub x_col: usize,
    pub y_col: usize,
    pub title: String,
    pub color: &'static str,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub output: String,
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub curves: Vec<Curve>,
    /// Optional x range.
    pub xrange: Option<(f64, f64)>,
}

/// A gnuplot script rendering each panel to its own PNG. Paths are relative
/// to the script's directory.
pub fn gnuplot_script(panels: &[Panel]) -> String {
    let mut out = String::from("set datafile separator ','\nset key top right\nset grid\n");
    out.push_str("set terminal pngcairo size 1000,500\n");
    for p in panels {
        let _ = writeln!(out, "\nset output '{}'", p.output);
        let _ = writeln!(out, "set title \"{}\"", p.title);
        let _ = writeln!(
            out,
            "set xlabel \"{}\"\nset ylabel \"{}\"",
            p.xlabel, p.ylabel
        );
        match p.xrange {
            Some((a, b)) => {
                let _ = writeln!(out, "set xrange [{a}:{b}]");
            }
            None => out.push_str("set autoscale x\n"),
        }
        let parts: Vec<String> = p
            .curves
            .iter()
            .map(|c| {
                format!(
                    "'{}' every ::1 using {}:{} with lines lc rgb '{}' title \"{}\"",
                    c.file, c.x_col, c.y_col, c.color, c.title
                )
            })
            .collect();
        let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recorded_checks_do_not_fail_reports() {
        let mut r = ExperimentReport::new("x");
        r.assert("a", true, "ok");
        r.record("b", false, "informational");
        assert!(r.passed());
        r.assert("c", false, "bad");
        assert!(!r.passed());
        assert!(r.summary().contains("[FAIL] c"));
    }

    #[test]
    fn gnuplot_lists_every_curve() {
        let panel = Panel {
            output: "a.png".into(),
            title: "t".into(),
            xlabel: "x".into(),
            ylabel: "y".into(),
            curves: vec![
                Curve {
                    file: "s.csv".into(),
                    x_col: 1,
                    y_col: 2,
                    title: "one".into(),
                    color: "red",
                },
                Curve {
                    file: "d.csv".into(),
                    x_col: 1,
                    y_col: 3,
                    title: "two".into(),
                    color: "blue",
                },
            ],
            xrange: Some((0.0, 1.0)),
        };
        let s = gnuplot_script(&[panel]);
        assert!(s.contains("'s.csv' every ::1 using 1:2"));
        assert!(s.contains("'d.csv' every ::1 using 1:3"));
        assert!(s.contains("set xrange [0:1]"));
    }
}
