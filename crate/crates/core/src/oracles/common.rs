//! Exact extrema of closed-form signals and shared interpolation helpers.

use crate::error::{EmdError, Result};
use crate::extrema::ExtremumKind;
use crate::interp::{fit_lagrange_piecewise, fit_spline_with, Interpolant, Knots, SplineBoundary};
use crate::quad::{brent, root_near};
use crate::signal::{ContinuousSignal, Point};

/// Largest `|f'(t*)|` accepted at a reported extremum.
pub const DERIVATIVE_RESIDUAL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactExtremum {
    pub t: f64,
    pub v: f64,
    pub kind: ExtremumKind,
}

fn classify(sig: &impl ContinuousSignal, t: f64) -> ExtremumKind {
    if sig.second_derivative(t) < 0.0 {
        ExtremumKind::Maximum
    } else {
        ExtremumKind::Minimum
    }
}

/// The extremum of `sig` nearest `guess`, by bracketed root finding on `f'`.
pub fn extremum_near(
    sig: &impl ContinuousSignal,
    guess: f64,
    radius: f64,
) -> Result<ExactExtremum> {
    let t = root_near(|t| sig.derivative(t), guess, radius * 1e-3, radius)?;
    check_residual(sig, t)?;
    Ok(ExactExtremum {
        t,
        v: sig.value(t),
        kind: classify(sig, t),
    })
}

/// All extrema in `[lo, hi]`, located by scanning `f'` for sign changes on a
/// grid of spacing at most `step` and refining each bracket.
pub fn extrema_by_scan(
    sig: &impl ContinuousSignal,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<Vec<ExactExtremum>> {
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / cells as f64;
    let mut out: Vec<ExactExtremum> = Vec::new();
    let mut a = lo;
    let mut fa = sig.derivative(a);
    for k in 1..=cells {
        let b = if k == cells { hi } else { lo + k as f64 * h };
        let fb = sig.derivative(b);
        let root = if fa == 0.0 {
            Some(a)
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            Some(brent(
                |t| sig.derivative(t),
                a,
                b,
                1e-15 * b.abs().max(1.0),
            )?)
        } else {
            None
        };
        if let Some(t) = root {
            if out.last().map_or(true, |e| t > e.t) {
                check_residual(sig, t)?;
                out.push(ExactExtremum {
                    t,
                    v: sig.value(t),
                    kind: classify(sig, t),
                });
            }
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 && out.last().map_or(true, |e| hi > e.t) {
        out.push(ExactExtremum {
            t: hi,
            v: sig.value(hi),
            kind: classify(sig, hi),
        });
    }
    Ok(out)
}

fn check_residual(sig: &impl ContinuousSignal, t: f64) -> Result<()> {
    // scale by the signal's derivative size so high-frequency tones are judged fairly
    let scale = sig.second_derivative(t).abs().max(1.0);
    if sig.derivative(t).abs() > DERIVATIVE_RESIDUAL * scale {
        return Err(EmdError::RootBracketFailure(t));
    }
    Ok(())
}

/// Midpoint times between consecutive extrema.
pub fn midpoint_times(extrema: &[ExactExtremum]) -> Vec<f64> {
    extrema
        .windows(2)
        .map(|w| 0.5 * (w[0].t + w[1].t))
        .collect()
}

/// Knots `(t, sig(t))`.
pub fn knots_on(sig: &impl Fn(f64) -> f64, times: &[f64]) -> Result<Knots> {
    Knots::new(times.iter().map(|&t| Point::new(t, sig(t))).collect())
}

/// How an oracle interpolates its knots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleCurve {
    Spline(SplineBoundary),
    /// Disjoint Lagrange groups of the given degree.
    Lagrange(usize),
}

pub fn fit_curve(knots: &Knots, curve: OracleCurve) -> Result<Interpolant> {
    match curve {
        OracleCurve::Spline(b) => Ok(fit_spline_with(knots, b)),
        OracleCurve::Lagrange(d) => fit_lagrange_piecewise(knots, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::ToneRecipe;
    use std::f64::consts::PI;

    #[test]
    fn cosine_extrema_are_multiples_of_pi() {
        let sig = ToneRecipe::equal_weights(&[1.3]).unwrap();
        let e = extrema_by_scan(&sig, -0.1, 10.0, 0.05).unwrap();
        assert_eq!(e.len(), 5);
        for (k, x) in e.iter().enumerate() {
            assert!((x.t - k as f64 * PI / 1.3).abs() < 1e-13);
            let expected = if k % 2 == 0 {
                ExtremumKind::Maximum
            } else {
                ExtremumKind::Minimum
            };
            assert_eq!(x.kind, expected);
        }
        let m = extremum_near(&sig, 2.3, 0.5).unwrap();
        assert!((m.t - PI / 1.3).abs() < 1e-14);
    }
}
