//! Residual after one midpoint sift with linear interpolation of
//! `cos ωt + ε f(t)`, as a function of `ω`.
//!
//! The midpoint interpolant should recover `ε f` with an error of order
//! `ε (π/ω)² ‖f''‖`, so the interior `L¹` norm of
//! `(S0 − g) − cos ωt = ε f − g` falls off like `ω⁻²`.

use std::f64::consts::PI;

use super::common::{extrema_by_scan, midpoint_times};
use super::ScalingFit;
use crate::error::Result;
use crate::interp::{fit_lagrange_piecewise, Knots};
use crate::quad::integrate_with_breaks;
use crate::signal::{ContinuousSignal, Point};

/// `cos ωt + ε f(t)` for any closed-form `f`.
struct Perturbed<'a, F: ContinuousSignal> {
    omega: f64,
    eps: f64,
    f: &'a F,
}

impl<F: ContinuousSignal> ContinuousSignal for Perturbed<'_, F> {
    fn value(&self, t: f64) -> f64 {
        (self.omega * t).cos() + self.eps * self.f.value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        -self.omega * (self.omega * t).sin() + self.eps * self.f.derivative(t)
    }
    fn second_derivative(&self, t: f64) -> f64 {
        -self.omega * self.omega * (self.omega * t).cos() + self.eps * self.f.second_derivative(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Scan {
    pub omegas: Vec<f64>,
    /// Interior `L¹` residual per `ω`.
    pub residuals: Vec<f64>,
    /// Fit of residual against `π/ω`; `None` when any residual vanishes.
    pub fit: Option<ScalingFit>,
}

/// Interior `L¹` norm of `ε f − g` on `[0, span]` for one `ω`, where `g`
/// linearly interpolates the signal at the exact midpoints. Half a period
/// next to each outermost midpoint is excluded.
pub fn theorem3_residual(
    f: &impl ContinuousSignal,
    omega: f64,
    eps: f64,
    span: f64,
) -> Result<f64> {
    let sig = Perturbed { omega, eps, f };
    let half = PI / omega;
    let extrema = extrema_by_scan(&sig, -0.5 * half, span + 0.5 * half, half / 16.0)?;
    let mids = midpoint_times(&extrema);
    let knots = Knots::new(mids.iter().map(|&t| Point::new(t, sig.value(t))).collect())?;
    let g = fit_lagrange_piecewise(&knots, 1)?;
    let (lo, hi) = (mids[0] + half, mids[mids.len() - 1] - half);
    let mut breaks: Vec<f64> = mids.iter().copied().filter(|&t| t > lo && t < hi).collect();
    breaks.insert(0, lo);
    breaks.push(hi);
    let r = integrate_with_breaks(
        |t| (eps * f.value(t) - g.eval_extended(t)).abs(),
        &breaks,
        1e-16,
        1e-10,
    );
    Ok(r.value)
}

/// Residuals for each `ω` over a common span, fitted against `π/ω`.
pub fn theorem3_residual_scan(
    f: &impl ContinuousSignal,
    omegas: &[f64],
    eps: f64,
    span: f64,
) -> Result<Theorem3Scan> {
    let residuals: Vec<f64> = omegas
        .iter()
        .map(|&w| theorem3_residual(f, w, eps, span))
        .collect::<Result<_>>()?;
    // x = π/ω must increase, so fit in reverse ω order
    let mut pairs: Vec<(f64, f64)> = omegas
        .iter()
        .map(|w| PI / w)
        .zip(residuals.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let fit = ScalingFit::fit(&x, &y).ok();
    Ok(Theorem3Scan {
        omegas: omegas.to_vec(),
        residuals,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{Constant, ToneRecipe};

    #[test]
    fn constant_and_unperturbed_leave_no_residual() {
        let r = theorem3_residual(&Constant(0.7), 10.0, 0.05, 10.0).unwrap();
        assert!(r < 1e-12, "{r}");
        let f = ToneRecipe::equal_weights(&[2.7]).unwrap();
        let r = theorem3_residual(&f, 10.0, 0.0, 10.0).unwrap();
        assert!(r < 1e-12, "{r}");
    }
}
