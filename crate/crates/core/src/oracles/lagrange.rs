//! One sifting step on `cos ωt + cos(3ωt/2) + ε cos νt` over `[0, 5π/ω]`
//! with local cubic Lagrange interpolants instead of splines: one cubic
//! through four maxima, one through four minima, and two cubics through
//! the seven midpoints. Projections onto `cos(3ωt/2)` and `sin(3ωt/2)`.

use std::f64::consts::PI;

use super::common::{extrema_by_scan, fit_curve, knots_on, ExactExtremum, OracleCurve};
use super::ConstantsReport;
use crate::error::{EmdError, Result};
use crate::extrema::ExtremumKind;
use crate::quad::integrate_with_breaks;
use crate::signal::{ContinuousSignal, Tone, ToneRecipe};

const ABS_TOL: f64 = 1e-14;
const REL_TOL: f64 = 1e-13;

/// Extremum times in closed form, scaled by `1/ω`.
pub fn closed_form_knots(omega: f64) -> ([f64; 4], [f64; 4]) {
    let s10 = 10f64.sqrt();
    let p1 = 2.0 * (PI - ((25.0 - 2.0 * s10).sqrt() / (1.0 + s10)).atan());
    let q0 = 2.0 * ((25.0 + 2.0 * s10).sqrt() / (s10 - 1.0)).atan();
    let four_pi = 4.0 * PI;
    let maxima = [0.0, p1, four_pi - p1, four_pi].map(|t| t / omega);
    let minima = [q0, four_pi, four_pi - q0, four_pi + q0].map(|t| t / omega);
    (maxima, minima)
}

/// The four projections `P1c, P2c, Q1n, Q2n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeProjections {
    pub p1_c: f64,
    pub p2_c: f64,
    pub q1_n: f64,
    pub q2_n: f64,
}

impl LagrangeProjections {
    pub fn as_array(&self) -> [f64; 4] {
        [self.p1_c, self.p2_c, self.q1_n, self.q2_n]
    }
}

fn signal(omega: f64, eps: f64, nu: f64) -> Result<ToneRecipe> {
    let base = ToneRecipe::new(
        vec![Tone::cos(1.0, omega), Tone::cos(1.0, 1.5 * omega)],
        None,
    )?;
    if eps == 0.0 {
        Ok(base)
    } else {
        base.with_noise(eps, nu)
    }
}

/// Extrema of the signal on `[0, 5π/ω]`, located numerically.
pub fn numeric_extrema(omega: f64, eps: f64, nu: f64) -> Result<Vec<ExactExtremum>> {
    let sig = signal(omega, eps, nu)?;
    let hi = 5.0 * PI / omega;
    // start slightly left of 0 so the maximum at the origin is bracketed
    let mut e = extrema_by_scan(&sig, -0.25 / omega, hi, PI / omega / 200.0)?;
    e.retain(|x| x.t >= -1e-12 / omega && x.t <= hi);
    Ok(e)
}

/// Projections with interpolants through the given maxima and minima.
/// The signal value at each knot is recomputed from `eps` and `nu`.
pub fn projections_with_knots(
    omega: f64,
    eps: f64,
    nu: f64,
    maxima: &[f64; 4],
    minima: &[f64; 4],
) -> Result<LagrangeProjections> {
    let sig = signal(omega, eps, nu)?;
    let s0 = |t: f64| sig.value(t);
    let cubic = OracleCurve::Lagrange(3);
    let l_max = fit_curve(&knots_on(&s0, maxima)?, cubic)?;
    let l_min = fit_curve(&knots_on(&s0, minima)?, cubic)?;

    let mut all: Vec<f64> = maxima.iter().chain(minima).copied().collect();
    all.sort_by(f64::total_cmp);
    let mids: Vec<f64> = all.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if mids.len() != 7 {
        return Err(EmdError::InsufficientExtrema {
            maxima: 4,
            minima: 4,
        });
    }
    let l_mid = fit_curve(&knots_on(&s0, &mids)?, cubic)?;

    let probe = 1.5 * omega;
    let h_c = |t: f64| s0(t) - 0.5 * (l_max.eval_extended(t) + l_min.eval_extended(t));
    let h_n = |t: f64| s0(t) - l_mid.eval_extended(t);
    let (lo_c, hi_c) = (minima[0], maxima[3]);
    let breaks_c: Vec<f64> = {
        let mut b: Vec<f64> = all
            .iter()
            .copied()
            .filter(|&t| t >= lo_c && t <= hi_c)
            .collect();
        b.dedup();
        b
    };
    let breaks_n = [mids[0], mids[3], mids[6]];
    let int =
        |f: &dyn Fn(f64) -> f64, b: &[f64]| integrate_with_breaks(f, b, ABS_TOL, REL_TOL).value;
    Ok(LagrangeProjections {
        p1_c: int(&|t| h_c(t) * (probe * t).cos(), &breaks_c),
        p2_c: int(&|t| h_c(t) * (probe * t).sin(), &breaks_c),
        q1_n: int(&|t| h_n(t) * (probe * t).cos(), &breaks_n),
        q2_n: int(&|t| h_n(t) * (probe * t).sin(), &breaks_n),
    })
}

fn split(extrema: &[ExactExtremum]) -> Result<([f64; 4], [f64; 4])> {
    let pick = |kind| -> Vec<f64> {
        extrema
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.t)
            .take(4)
            .collect()
    };
    let (mx, mn) = (pick(ExtremumKind::Maximum), pick(ExtremumKind::Minimum));
    if mx.len() < 4 || mn.len() < 4 {
        return Err(EmdError::InsufficientExtrema {
            maxima: mx.len(),
            minima: mn.len(),
        });
    }
    Ok(([mx[0], mx[1], mx[2], mx[3]], [mn[0], mn[1], mn[2], mn[3]]))
}

/// Projections at knots located numerically for the unperturbed signal.
pub fn lagrange_projections(omega: f64, eps: f64, nu: f64) -> Result<LagrangeProjections> {
    let (mx, mn) = split(&numeric_extrema(omega, 0.0, nu)?)?;
    projections_with_knots(omega, eps, nu, &mx, &mn)
}

pub const REFERENCE_VALUES: [f64; 4] = [3.8568, -1.0637, 6.3795, -0.2184];
pub const REFERENCE_EPS_SLOPES: [f64; 4] = [0.0175, 0.0399, -0.1257, 0.3113];
const LABELS: [&str; 4] = ["P1c", "P2c", "Q1n", "Q2n"];

/// Constants in the `ε → 0` limit scaled by `ω`, and two readings of the
/// `ε`-slope at fixed knots: the total derivative, and the interpolant's
/// share of it (total minus the direct `∫ cos νt · probe` term). Only the
/// limit constants are asserted.
pub fn lagrange_projection_report(omega: f64, eps: f64, nu: f64) -> Result<ConstantsReport> {
    let numeric = numeric_extrema(omega, 0.0, nu)?;
    let (mx, mn) = split(&numeric)?;
    let base = projections_with_knots(omega, 0.0, nu, &mx, &mn)?.as_array();
    let pert = projections_with_knots(omega, eps, nu, &mx, &mn)?.as_array();

    // the direct term: projection of cos νt alone over each interval
    let probe = 1.5 * omega;
    let mut all: Vec<f64> = mx.iter().chain(&mn).copied().collect();
    all.sort_by(f64::total_cmp);
    let (d0, d6) = (0.5 * (all[0] + all[1]), 0.5 * (all[6] + all[7]));
    let direct = |lo: f64, hi: f64, sin: bool| {
        integrate_with_breaks(
            |t| {
                (nu * t).cos()
                    * if sin {
                        (probe * t).sin()
                    } else {
                        (probe * t).cos()
                    }
            },
            &[lo, hi],
            ABS_TOL,
            REL_TOL,
        )
        .value
    };
    let direct_terms = [
        direct(mn[0], mx[3], false),
        direct(mn[0], mx[3], true),
        direct(d0, d6, false),
        direct(d0, d6, true),
    ];

    let mut r = ConstantsReport::default();
    for i in 0..4 {
        r.push(LABELS[i], base[i] * omega, REFERENCE_VALUES[i], Some(0.05));
    }
    for i in 0..4 {
        let total = (pert[i] - base[i]) / eps * omega;
        r.push(
            &format!("d{}/deps total", LABELS[i]),
            total,
            REFERENCE_EPS_SLOPES[i],
            None,
        );
        let response = total - direct_terms[i] * omega;
        r.push(
            &format!("d{}/deps interpolant", LABELS[i]),
            response,
            REFERENCE_EPS_SLOPES[i],
            None,
        );
    }

    let (pm, pn) = closed_form_knots(omega);
    let closed = projections_with_knots(omega, 0.0, nu, &pm, &{
        let mut s = pn;
        s.sort_by(f64::total_cmp);
        s
    });
    match closed {
        Ok(p) => r.note("closed_form_knots_P1c*omega", p.p1_c * omega),
        Err(e) => r.note("closed_form_knots", format!("unusable: {e}")),
    }
    for (i, t) in mn.iter().enumerate() {
        r.note(&format!("numeric_q{i}*omega"), t * omega);
    }
    for (i, t) in mx.iter().enumerate() {
        r.note(&format!("numeric_p{i}*omega"), t * omega);
    }
    r.note("closed_form_q1*omega", pn[1] * omega);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_maxima_match_numeric() {
        let w = 1.3;
        let (pm, pn) = closed_form_knots(w);
        let (mx, mn) = split(&numeric_extrema(w, 0.0, 1.5 * w).unwrap()).unwrap();
        for (a, b) in pm.iter().zip(mx) {
            assert!((a - b).abs() < 1e-10, "{pm:?} {mx:?}");
        }
        // closed-form q1 is 4π/ω, the numeric minimum sits at 2π/ω
        assert!((mn[1] - 2.0 * PI / w).abs() < 1e-10);
        assert!((pn[1] - 4.0 * PI / w).abs() < 1e-12);
        for i in [0, 2, 3] {
            assert!((pn[i] - mn[i]).abs() < 1e-10, "{pn:?} {mn:?}");
        }
    }

    #[test]
    fn projections_scale_with_inverse_omega() {
        let a = lagrange_projections(1.0, 0.0, 1.5).unwrap().as_array();
        let b = lagrange_projections(2.0, 0.0, 3.0).unwrap().as_array();
        for (x, y) in a.iter().zip(b) {
            assert!((x - 2.0 * y).abs() < 1e-9 * x.abs().max(1.0));
        }
    }
}
