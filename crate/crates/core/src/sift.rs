//! Sifting: one step, IMF extraction, and the full decomposition loop.
//!
//! Three sifting functions are supported:
//!
//! - **Classical**: the mean of the upper and lower envelopes, each an
//!   interpolant through the maxima (resp. minima).
//! - **Midpoint**: a single interpolant through the signal values at the
//!   midpoints between consecutive extrema. These midpoints stand in for the
//!   zero crossings of the local oscillation, so one curve replaces two.
//! - **Hybrid**: the pointwise average of the two.
//!
//! Envelopes are fitted on knot sets mirror-extended across both grid ends
//! (two knots per end), so the sifting function is defined on the whole grid.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{EmdError, Result};
use crate::extrema::{compute_midpoints, find_extrema, refine_extrema, ExtremaSet};
use crate::interp::{fit_lagrange_covering, fit_spline, Interpolant, Knots};
use crate::signal::{fmt_f64, signal_norm, NormKind, Point, SampledSignal};

/// Knots reflected across each grid end before fitting an envelope.
const MIRROR_KNOTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiftMethod {
    Classical,
    Midpoint,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeInterp {
    Spline,
    /// Piecewise Lagrange of degree 1, 2 or 3.
    Lagrange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceNorm {
    /// `||h_prev - h_new|| / ||h_prev||`
    L2Relative,
    /// `sum (h_prev - h_new)^2 / sum h_prev^2`
    Sd,
}

/// Where extremum times come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremaLocation {
    /// The detected sample time.
    Sample,
    /// The vertex of the parabola through the sample and its neighbours.
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiftConfig {
    pub method: SiftMethod,
    pub interp: EnvelopeInterp,
    pub conv_epsilon: f64,
    pub conv_norm: ConvergenceNorm,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
    pub extrema: ExtremaLocation,
    /// Stop decomposing once the residue's L2 norm is at most this fraction
    /// of the input's. Zero disables the check.
    pub residue_tol: f64,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            method: SiftMethod::Midpoint,
            interp: EnvelopeInterp::Spline,
            conv_epsilon: 1e-3,
            conv_norm: ConvergenceNorm::Sd,
            max_sift_iters: 200,
            max_imfs: 10,
            extrema: ExtremaLocation::Parabolic,
            residue_tol: 5e-3,
        }
    }
}

impl SiftConfig {
    pub fn new(method: SiftMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn with_interp(mut self, interp: EnvelopeInterp) -> Self {
        self.interp = interp;
        self
    }

    pub fn with_threshold(mut self, conv_norm: ConvergenceNorm, conv_epsilon: f64) -> Self {
        self.conv_norm = conv_norm;
        self.conv_epsilon = conv_epsilon;
        self
    }

    pub fn with_max_iters(mut self, max_sift_iters: usize) -> Self {
        self.max_sift_iters = max_sift_iters;
        self
    }

    pub fn with_max_imfs(mut self, max_imfs: usize) -> Self {
        self.max_imfs = max_imfs;
        self
    }

    pub fn with_extrema(mut self, extrema: ExtremaLocation) -> Self {
        self.extrema = extrema;
        self
    }

    pub fn with_residue_tol(mut self, residue_tol: f64) -> Self {
        self.residue_tol = residue_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residue_tol.is_finite() && self.residue_tol >= 0.0) {
            return Err(EmdError::InvalidConfig(format!(
                "residue_tol must be >= 0, got {}",
                self.residue_tol
            )));
        }
        if !(self.conv_epsilon.is_finite() && self.conv_epsilon > 0.0) {
            return Err(EmdError::InvalidConfig(format!(
                "conv_epsilon must be > 0, got {}",
                self.conv_epsilon
            )));
        }
        if self.max_sift_iters == 0 {
            return Err(EmdError::InvalidConfig(
                "max_sift_iters must be >= 1".into(),
            ));
        }
        if self.max_imfs == 0 {
            return Err(EmdError::InvalidConfig("max_imfs must be >= 1".into()));
        }
        if let EnvelopeInterp::Lagrange(d) = self.interp {
            if !(1..=3).contains(&d) {
                return Err(EmdError::UnsupportedDegree(d));
            }
        }
        Ok(())
    }

    /// Interpolants fitted per sifting step.
    pub fn fits_per_iteration(&self) -> usize {
        match self.method {
            SiftMethod::Classical => 2,
            SiftMethod::Midpoint => 1,
            SiftMethod::Hybrid => 3,
        }
    }
}

impl std::fmt::Display for SiftMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SiftMethod::Classical => "classical",
            SiftMethod::Midpoint => "midpoint",
            SiftMethod::Hybrid => "hybrid",
        })
    }
}

impl FromStr for SiftMethod {
    type Err = EmdError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(Self::Classical),
            "midpoint" => Ok(Self::Midpoint),
            "hybrid" => Ok(Self::Hybrid),
            _ => Err(EmdError::InvalidConfig(format!("unknown method `{s}`"))),
        }
    }
}

impl std::fmt::Display for EnvelopeInterp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvelopeInterp::Spline => f.write_str("spline"),
            EnvelopeInterp::Lagrange(d) => write!(f, "lagrange{d}"),
        }
    }
}

impl FromStr for EnvelopeInterp {
    type Err = EmdError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spline" => Ok(Self::Spline),
            "lagrange1" => Ok(Self::Lagrange(1)),
            "lagrange2" => Ok(Self::Lagrange(2)),
            "lagrange3" => Ok(Self::Lagrange(3)),
            _ => Err(EmdError::InvalidConfig(format!(
                "unknown interpolant `{s}`"
            ))),
        }
    }
}

impl std::fmt::Display for ConvergenceNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConvergenceNorm::L2Relative => "l2rel",
            ConvergenceNorm::Sd => "sd",
        })
    }
}

impl FromStr for ConvergenceNorm {
    type Err = EmdError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2rel" => Ok(Self::L2Relative),
            "sd" => Ok(Self::Sd),
            _ => Err(EmdError::InvalidConfig(format!("unknown norm `{s}`"))),
        }
    }
}

impl std::fmt::Display for ExtremaLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExtremaLocation::Sample => "sample",
            ExtremaLocation::Parabolic => "parabolic",
        })
    }
}

impl FromStr for ExtremaLocation {
    type Err = EmdError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sample" => Ok(Self::Sample),
            "parabolic" => Ok(Self::Parabolic),
            _ => Err(EmdError::InvalidConfig(format!(
                "unknown extrema location `{s}`"
            ))),
        }
    }
}

/// One extracted intrinsic mode function.
#[derive(Debug, Clone, PartialEq)]
pub struct Imf {
    pub signal: SampledSignal,
    pub sift_iterations: usize,
    /// False only when the iteration cap was hit or extrema ran out mid-sift.
    pub converged: bool,
    /// Interpolants fitted while extracting this IMF.
    pub interpolant_fits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub imfs: Vec<Imf>,
    pub residue: SampledSignal,
    pub config: SiftConfig,
}

impl Decomposition {
    /// Sum of all IMFs and the residue.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residue.values().to_vec();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf.signal.values()) {
                *o += v;
            }
        }
        out
    }

    /// `t,imf1,...,imfK,residue`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for k in 1..=self.imfs.len() {
            let _ = write!(out, ",imf{k}");
        }
        out.push_str(",residue\n");
        let grid = self.residue.grid();
        for i in 0..grid.len() {
            out.push_str(&fmt_f64(grid.time(i)));
            for imf in &self.imfs {
                out.push(',');
                out.push_str(&fmt_f64(imf.signal.values()[i]));
            }
            out.push(',');
            out.push_str(&fmt_f64(self.residue.values()[i]));
            out.push('\n');
        }
        out
    }

    /// Flat `key=value` metadata describing the run.
    pub fn metadata(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "method={}", c.method);
        let _ = writeln!(out, "interp={}", c.interp);
        let _ = writeln!(out, "conv_norm={}", c.conv_norm);
        let _ = writeln!(out, "conv_epsilon={:e}", c.conv_epsilon);
        let _ = writeln!(out, "max_sift_iters={}", c.max_sift_iters);
        let _ = writeln!(out, "max_imfs={}", c.max_imfs);
        let _ = writeln!(out, "extrema={}", c.extrema);
        let _ = writeln!(out, "residue_tol={:e}", c.residue_tol);
        let _ = writeln!(out, "imf_count={}", self.imfs.len());
        for (k, imf) in self.imfs.iter().enumerate() {
            let _ = writeln!(out, "imf{}_iterations={}", k + 1, imf.sift_iterations);
            let _ = writeln!(out, "imf{}_converged={}", k + 1, imf.converged);
            let _ = writeln!(
                out,
                "imf{}_interpolant_fits={}",
                k + 1,
                imf.interpolant_fits
            );
        }
        out
    }
}

fn detect(s: &SampledSignal, cfg: &SiftConfig) -> Result<ExtremaSet> {
    let set = match find_extrema(s) {
        Ok(set) => set,
        Err(EmdError::NoExtrema) | Err(EmdError::TooFewSamples { .. }) => {
            return Err(EmdError::InsufficientExtrema {
                maxima: 0,
                minima: 0,
            })
        }
        Err(e) => return Err(e),
    };
    if set.maxima.len() < 2 || set.minima.len() < 2 {
        return Err(EmdError::InsufficientExtrema {
            maxima: set.maxima.len(),
            minima: set.minima.len(),
        });
    }
    Ok(match cfg.extrema {
        ExtremaLocation::Sample => set,
        ExtremaLocation::Parabolic => refine_extrema(s, &set),
    })
}

/// Fits the configured interpolant through `points` (mirror-extended across
/// the grid ends) and samples it at every grid time.
fn envelope(s: &SampledSignal, points: Vec<Point>, interp: EnvelopeInterp) -> Result<Vec<f64>> {
    let grid = s.grid();
    let knots = Knots::new(points)?.mirror_extended(grid.t_start(), grid.t_end(), MIRROR_KNOTS)?;
    let curve: Interpolant = match interp {
        EnvelopeInterp::Spline => fit_spline(&knots),
        EnvelopeInterp::Lagrange(d) => fit_lagrange_covering(&knots, d)?,
    };
    curve.sample_sorted(&s.times())
}

/// The sifting function and the number of interpolants fitted to build it.
pub fn sifting_function_counted(
    s: &SampledSignal,
    cfg: &SiftConfig,
) -> Result<(SampledSignal, usize)> {
    let extrema = detect(s, cfg)?;
    let classical = || -> Result<Vec<f64>> {
        let upper = envelope(s, extrema.maxima_points(), cfg.interp)?;
        let lower = envelope(s, extrema.minima_points(), cfg.interp)?;
        Ok(upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| 0.5 * (u + l))
            .collect())
    };
    let midpoint = || -> Result<Vec<f64>> {
        let mids = compute_midpoints(s, &extrema)?;
        envelope(s, mids.points, cfg.interp)
    };
    let mean = match cfg.method {
        SiftMethod::Classical => classical()?,
        SiftMethod::Midpoint => midpoint()?,
        SiftMethod::Hybrid => {
            let c = classical()?;
            let m = midpoint()?;
            c.iter().zip(&m).map(|(a, b)| 0.5 * (a + b)).collect()
        }
    };
    Ok((
        SampledSignal::new(*s.grid(), mean)?,
        cfg.fits_per_iteration(),
    ))
}

/// The curve subtracted from the signal in one sifting step.
pub fn sifting_function(s: &SampledSignal, cfg: &SiftConfig) -> Result<SampledSignal> {
    sifting_function_counted(s, cfg).map(|(m, _)| m)
}

/// `s - sifting_function(s)`.
pub fn sift_once(s: &SampledSignal, cfg: &SiftConfig) -> Result<SampledSignal> {
    s.sub(&sifting_function(s, cfg)?)
}

fn change_measure(prev: &[f64], next: &[f64], norm: ConvergenceNorm) -> f64 {
    let diff: f64 = prev.iter().zip(next).map(|(a, b)| (a - b) * (a - b)).sum();
    let base: f64 = prev.iter().map(|a| a * a).sum();
    if base == 0.0 {
        return 0.0;
    }
    match norm {
        ConvergenceNorm::L2Relative => (diff / base).sqrt(),
        ConvergenceNorm::Sd => diff / base,
    }
}

/// Iterates sifting until the change measure drops below the threshold.
pub fn extract_imf(s: &SampledSignal, cfg: &SiftConfig) -> Result<Imf> {
    cfg.validate()?;
    let mut h = s.clone();
    let mut fits = 0;
    for iteration in 1..=cfg.max_sift_iters {
        let (m, used) = match sifting_function_counted(&h, cfg) {
            Ok(r) => r,
            Err(e) if iteration == 1 => return Err(e),
            Err(EmdError::InsufficientExtrema { .. }) => {
                return Ok(Imf {
                    signal: h,
                    sift_iterations: iteration - 1,
                    converged: false,
                    interpolant_fits: fits,
                })
            }
            Err(e) => return Err(e),
        };
        fits += used;
        let next = h.sub(&m)?;
        let change = change_measure(h.values(), next.values(), cfg.conv_norm);
        h = next;
        if change < cfg.conv_epsilon {
            return Ok(Imf {
                signal: h,
                sift_iterations: iteration,
                converged: true,
                interpolant_fits: fits,
            });
        }
    }
    Ok(Imf {
        signal: h,
        sift_iterations: cfg.max_sift_iters,
        converged: false,
        interpolant_fits: fits,
    })
}

/// Extracts IMFs from the running residue until it runs out of extrema or
/// `max_imfs` is reached. `sum(imfs) + residue` reproduces the input.
pub fn decompose(s: &SampledSignal, cfg: &SiftConfig) -> Result<Decomposition> {
    cfg.validate()?;
    let mut residue = s.clone();
    let mut imfs = Vec::new();
    let floor = cfg.residue_tol * signal_norm(s, NormKind::L2);
    while imfs.len() < cfg.max_imfs {
        if !imfs.is_empty() && signal_norm(&residue, NormKind::L2) <= floor {
            break;
        }
        match extract_imf(&residue, cfg) {
            Ok(imf) => {
                residue = residue.sub(&imf.signal)?;
                imfs.push(imf);
            }
            Err(EmdError::InsufficientExtrema { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(Decomposition {
        imfs,
        residue,
        config: *cfg,
    })
}
