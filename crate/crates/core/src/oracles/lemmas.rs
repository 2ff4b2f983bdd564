//! Projections of close tones onto the midpoint interpolant built from the
//! first five midpoints of their sum.
//!
//! For `f = Σ f_i`, the extrema near `nπ/ω` (`n = 0..=5`) give midpoints
//! `t1..t5`. The interpolant `g` is piecewise linear (4 segments), piecewise
//! quadratic (`t1..t3`, `t3..t5`) or one cubic on `t1..t4`. Each tone's
//! projection is `P_i = ∫ f_i g`. Differences `P_i − P_j` are integrated as
//! `∫ (f_i − f_j) g` with the difference written as a product of sines, so
//! the `O(ε³)` quantities are not lost to cancellation.

use std::f64::consts::PI;

use super::common::extremum_near;
use super::ScalingFit;
use crate::error::Result;
use crate::interp::{fit_lagrange_piecewise, Interpolant, Knots};
use crate::quad::integrate_with_breaks;
use crate::signal::{ContinuousSignal, Point, Tone, ToneRecipe};

const ABS_TOL: f64 = 1e-20;
const REL_TOL: f64 = 1e-12;

/// The signal family under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LemmaFamily {
    /// `cos ωt + cos((1+aε)ωt) + cos((1+bε)ωt)`
    ThreeTone { a: f64, b: f64 },
    /// `cos ωt + cos((1+aε)ωt + φ)`
    PhaseShifted { a: f64, phase: f64 },
}

impl LemmaFamily {
    /// Tone `i` as `(relative frequency offset per ε, phase)`.
    fn tones(&self) -> Vec<(f64, f64)> {
        match *self {
            LemmaFamily::ThreeTone { a, b } => vec![(0.0, 0.0), (a, 0.0), (b, 0.0)],
            LemmaFamily::PhaseShifted { a, phase } => vec![(0.0, 0.0), (a, phase)],
        }
    }

    fn recipe(&self, omega: f64, eps: f64) -> Result<ToneRecipe> {
        ToneRecipe::new(
            self.tones()
                .iter()
                .map(|&(c, ph)| Tone::new(1.0, (1.0 + c * eps) * omega, ph))
                .collect(),
            None,
        )
    }

    /// Index pairs `(i, j)` whose differences are reported.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        match self {
            LemmaFamily::ThreeTone { .. } => vec![(0, 1), (0, 2), (1, 2)],
            LemmaFamily::PhaseShifted { .. } => vec![(0, 1)],
        }
    }
}

/// Projections for one `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaProjections {
    pub eps: f64,
    /// Extremum times `t*_0..t*_5`.
    pub extrema: Vec<f64>,
    /// Midpoints `t1..t5`.
    pub midpoints: Vec<f64>,
    /// `P_i` per tone.
    pub projections: Vec<f64>,
    /// `P_i − P_j` for each of `family.pairs()`.
    pub differences: Vec<f64>,
}

fn interpolant(knots: &[Point], degree: usize) -> Result<Interpolant> {
    let used = if degree == 3 { &knots[..4] } else { knots };
    fit_lagrange_piecewise(&Knots::new(used.to_vec())?, degree)
}

/// `cos(x) − cos(y) = −2 sin((x+y)/2) sin((x−y)/2)`
fn cos_difference(x: f64, y: f64) -> f64 {
    -2.0 * (0.5 * (x + y)).sin() * (0.5 * (x - y)).sin()
}

pub fn lemma_projections(
    family: LemmaFamily,
    omega: f64,
    degree: usize,
    eps: f64,
) -> Result<LemmaProjections> {
    let sig = family.recipe(omega, eps)?;
    let extrema: Vec<f64> = (0..=5)
        .map(|n| extremum_near(&sig, n as f64 * PI / omega, 0.5 * PI / omega).map(|e| e.t))
        .collect::<Result<_>>()?;
    let midpoints: Vec<f64> = extrema.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let knots: Vec<Point> = midpoints
        .iter()
        .map(|&t| Point::new(t, sig.value(t)))
        .collect();
    let g = interpolant(&knots, degree)?;
    let breaks = g.breakpoints();

    let tones = family.tones();
    let arg = |i: usize, t: f64| (1.0 + tones[i].0 * eps) * omega * t + tones[i].1;
    let int = |f: &dyn Fn(f64) -> f64| integrate_with_breaks(f, &breaks, ABS_TOL, REL_TOL).value;

    let projections = (0..tones.len())
        .map(|i| int(&|t| arg(i, t).cos() * g.eval_extended(t)))
        .collect();
    let differences = family
        .pairs()
        .iter()
        .map(|&(i, j)| int(&|t| cos_difference(arg(i, t), arg(j, t)) * g.eval_extended(t)))
        .collect();
    Ok(LemmaProjections {
        eps,
        extrema,
        midpoints,
        projections,
        differences,
    })
}

/// Leading-order value of `P_i − P_j` for pair `(i, j)`.
pub fn leading_order_difference(
    family: LemmaFamily,
    omega: f64,
    degree: usize,
    eps: f64,
    pair: (usize, usize),
) -> f64 {
    match family {
        LemmaFamily::ThreeTone { a, b } => {
            let q = b * b + a * a - a * b;
            let c = match pair {
                (0, 1) => a,
                (0, 2) => b,
                _ => b - a,
            };
            let coef = if degree == 3 {
                8.0 / 9.0 * q * (49.0 * PI * PI - 57.0) / PI
            } else {
                248.0 * PI / 3.0 * q
            };
            coef * c * eps.powi(3) / omega
        }
        LemmaFamily::PhaseShifted { a, phase } => {
            if degree == 3 {
                let k = 5.0 * PI * PI - 6.0;
                2.0 * a / (3.0 * omega * PI.powi(3))
                    * (a * a * PI * PI * (49.0 * PI * PI - 57.0) * eps.powi(3)
                        + 8.0 * a * PI * phase * k * eps * eps
                        + 2.0 * phase * phase * k * eps)
            } else {
                2.0 * a
                    * eps
                    * (6.0 * a * a * PI * PI * eps * eps
                        + (5.0 * PI * a * eps + 2.0 * phase).powi(2))
                    / (omega * PI)
            }
        }
    }
}

/// Leading-order `P_i` of the three-tone family, `(8π/3)(b²+a²−ab)ε/ω`.
pub fn leading_order_projection(a: f64, b: f64, omega: f64, eps: f64) -> f64 {
    8.0 * PI / 3.0 * (b * b + a * a - a * b) * eps / omega
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaScan {
    pub family: LemmaFamily,
    pub degree: usize,
    pub rows: Vec<LemmaProjections>,
    /// One fit of `|P_i − P_j|` against `ε` per pair.
    pub fits: Vec<ScalingFit>,
}

/// Projections over an `ε` list with a log-log fit per difference.
pub fn lemma_projection_scan(
    family: LemmaFamily,
    omega: f64,
    degree: usize,
    eps_list: &[f64],
) -> Result<LemmaScan> {
    let rows: Vec<LemmaProjections> = eps_list
        .iter()
        .map(|&e| lemma_projections(family, omega, degree, e))
        .collect::<Result<_>>()?;
    let fits = (0..family.pairs().len())
        .map(|k| {
            let y: Vec<f64> = rows.iter().map(|r| r.differences[k]).collect();
            ScalingFit::fit(eps_list, &y)
        })
        .collect::<Result<_>>()?;
    Ok(LemmaScan {
        family,
        degree,
        rows,
        fits,
    })
}

/// Differences of the phase-shifted family at fixed `ε` over a list of phases.
pub fn phase_scan(
    a: f64,
    omega: f64,
    degree: usize,
    eps: f64,
    phases: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    phases
        .iter()
        .map(|&phase| {
            let fam = LemmaFamily::PhaseShifted { a, phase };
            let r = lemma_projections(fam, omega, degree, eps)?;
            Ok((
                phase,
                r.differences[0],
                leading_order_difference(fam, omega, degree, eps, (0, 1)),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_offsets_give_identical_projections() {
        let fam = LemmaFamily::ThreeTone { a: 1.5, b: 1.5 };
        let r = lemma_projections(fam, 1.0, 1, 1e-2).unwrap();
        assert_eq!(r.differences[2], 0.0);
        assert_eq!(r.projections[1], r.projections[2]);
    }

    #[test]
    fn five_midpoints_near_half_periods() {
        let fam = LemmaFamily::ThreeTone { a: 1.0, b: 2.0 };
        let r = lemma_projections(fam, 2.0, 2, 1e-3).unwrap();
        assert_eq!(r.extrema[0], 0.0);
        assert_eq!(r.midpoints.len(), 5);
        for (k, t) in r.midpoints.iter().enumerate() {
            assert!((t - (k as f64 + 0.5) * PI / 2.0).abs() < 1e-2);
        }
    }

    #[test]
    fn product_form_agrees_with_direct_difference_at_large_eps() {
        let fam = LemmaFamily::ThreeTone { a: 1.0, b: 2.0 };
        let r = lemma_projections(fam, 1.0, 1, 0.1).unwrap();
        let direct = r.projections[0] - r.projections[1];
        assert!((direct - r.differences[0]).abs() < 1e-10 * direct.abs());
    }
}
