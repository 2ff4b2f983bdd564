//! Natural cubic splines and piecewise Lagrange interpolants.
//!
//! Both families are stored the same way: a list of segments, each carrying
//! cubic (or lower degree) coefficients in the local variable `s = t - t0`.

use crate::error::{EmdError, Result};
use crate::signal::Point;

/// Knot times strictly increasing, at least two knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Knots(Vec<Point>);

impl Knots {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(EmdError::TooFewKnots {
                needed: 2,
                got: points.len(),
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].t == w[0].t {
                return Err(EmdError::DuplicateKnot(w[0].t));
            }
            if !(w[1].t > w[0].t) {
                return Err(EmdError::UnorderedKnots(i + 1));
            }
        }
        Ok(Self(points))
    }

    pub fn from_slices(t: &[f64], v: &[f64]) -> Result<Self> {
        Self::new(t.iter().zip(v).map(|(&t, &v)| Point::new(t, v)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Point {
        self.0[0]
    }

    pub fn last(&self) -> Point {
        self.0[self.0.len() - 1]
    }

    /// Reflects the `count` knots nearest each end of `[lo, hi]` across that
    /// end (even reflection: values are copied). Reflections that land on an
    /// existing knot time are dropped.
    pub fn mirror_extended(&self, lo: f64, hi: f64, count: usize) -> Result<Knots> {
        let pts = &self.0;
        let count = count.min(pts.len());
        let mut out: Vec<Point> = Vec::with_capacity(pts.len() + 2 * count);
        for p in pts[..count].iter().rev() {
            let t = 2.0 * lo - p.t;
            if t < pts[0].t {
                out.push(Point::new(t, p.v));
            }
        }
        out.extend_from_slice(pts);
        let last = pts[pts.len() - 1].t;
        for p in pts[pts.len() - count..].iter().rev() {
            let t = 2.0 * hi - p.t;
            if t > last {
                out.push(Point::new(t, p.v));
            }
        }
        Knots::new(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[non_exhaustive]
pub enum SplineBoundary {
    /// Zero second derivative at both ends.
    #[default]
    Natural,
    /// Prescribed first derivative at each end.
    Clamped { left: f64, right: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterpolantKind {
    CubicSpline(SplineBoundary),
    PiecewiseLagrange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    t0: f64,
    t1: f64,
    /// p(s) = c[0] + c[1] s + c[2] s^2 + c[3] s^3, s = t - t0
    c: [f64; 4],
}

impl Segment {
    #[inline]
    fn eval(&self, t: f64) -> f64 {
        let s = t - self.t0;
        self.c[0] + s * (self.c[1] + s * (self.c[2] + s * self.c[3]))
    }

    fn derivative(&self, t: f64, order: usize) -> f64 {
        let s = t - self.t0;
        let c = &self.c;
        match order {
            0 => self.eval(t),
            1 => c[1] + s * (2.0 * c[2] + 3.0 * s * c[3]),
            2 => 2.0 * c[2] + 6.0 * s * c[3],
            3 => 6.0 * c[3],
            _ => 0.0,
        }
    }
}

/// An evaluable piecewise polynomial through a set of knots.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    kind: InterpolantKind,
    knots: Knots,
    segments: Vec<Segment>,
}

impl Interpolant {
    pub fn kind(&self) -> InterpolantKind {
        self.kind
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.segments[0].t0,
            self.segments[self.segments.len() - 1].t1,
        )
    }

    /// Segment boundaries, useful as quadrature breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.t0).collect();
        b.push(self.domain().1);
        b
    }

    /// Per-segment `(t0, t1, [c0, c1, c2, c3])` in the local variable `t - t0`.
    pub fn coefficients(&self) -> Vec<(f64, f64, [f64; 4])> {
        self.segments.iter().map(|s| (s.t0, s.t1, s.c)).collect()
    }

    fn segment_index(&self, t: f64) -> usize {
        let idx = self.segments.partition_point(|s| s.t0 <= t);
        idx.saturating_sub(1).min(self.segments.len() - 1)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(EmdError::OutOfDomain { t, lo, hi });
        }
        Ok(self.segments[self.segment_index(t)].eval(t))
    }

    /// Evaluates without the domain check, extending the end segments.
    pub fn eval_extended(&self, t: f64) -> f64 {
        self.segments[self.segment_index(t)].eval(t)
    }

    /// Derivative of the given order (0..=3) of the segment containing `t`.
    pub fn derivative(&self, t: f64, order: usize) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return Err(EmdError::OutOfDomain { t, lo, hi });
        }
        Ok(self.segments[self.segment_index(t)].derivative(t, order))
    }

    /// One-sided derivative from the segment on the left (`left = true`) or
    /// right of an interior knot.
    pub fn one_sided_derivative(&self, knot_index: usize, order: usize, left: bool) -> f64 {
        let t = self.knots.points()[knot_index].t;
        let seg = if left {
            self.segments.iter().rposition(|s| s.t1 <= t && s.t0 < t)
        } else {
            self.segments.iter().position(|s| s.t0 >= t)
        };
        let seg = seg.unwrap_or_else(|| self.segment_index(t));
        self.segments[seg].derivative(t, order)
    }

    /// Evaluates on a sorted list of times in one pass.
    pub fn sample_sorted(&self, times: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) = self.domain();
        let mut out = Vec::with_capacity(times.len());
        let mut seg = 0;
        for &t in times {
            if !(t >= lo && t <= hi) {
                return Err(EmdError::OutOfDomain { t, lo, hi });
            }
            while seg + 1 < self.segments.len() && self.segments[seg + 1].t0 <= t {
                seg += 1;
            }
            out.push(self.segments[seg].eval(t));
        }
        Ok(out)
    }
}

/// Natural cubic spline through the knots.
pub fn fit_spline(knots: &Knots) -> Interpolant {
    fit_spline_with(knots, SplineBoundary::Natural)
}

pub fn fit_spline_with(knots: &Knots, boundary: SplineBoundary) -> Interpolant {
    let p = knots.points();
    let n = p.len();
    let h: Vec<f64> = p.windows(2).map(|w| w[1].t - w[0].t).collect();
    let slope: Vec<f64> = p
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1].v - w[0].v) / h)
        .collect();

    // second derivatives at the knots
    let m = match boundary {
        SplineBoundary::Natural => {
            let mut m = vec![0.0; n];
            if n > 2 {
                let sub: Vec<f64> = h[1..n - 2].to_vec();
                let diag: Vec<f64> = (0..n - 2).map(|i| 2.0 * (h[i] + h[i + 1])).collect();
                let rhs: Vec<f64> = (0..n - 2)
                    .map(|i| 6.0 * (slope[i + 1] - slope[i]))
                    .collect();
                m[1..n - 1].copy_from_slice(&solve_tridiagonal(&sub, &diag, &sub, rhs));
            }
            m
        }
        SplineBoundary::Clamped { left, right } => {
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            diag[0] = 2.0 * h[0];
            rhs[0] = 6.0 * (slope[0] - left);
            for i in 1..n - 1 {
                diag[i] = 2.0 * (h[i - 1] + h[i]);
                rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
            }
            diag[n - 1] = 2.0 * h[n - 2];
            rhs[n - 1] = 6.0 * (right - slope[n - 2]);
            solve_tridiagonal(&h, &diag, &h, rhs)
        }
    };

    let segments = (0..n - 1)
        .map(|i| Segment {
            t0: p[i].t,
            t1: p[i + 1].t,
            c: [
                p[i].v,
                slope[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0,
                0.5 * m[i],
                (m[i + 1] - m[i]) / (6.0 * h[i]),
            ],
        })
        .collect();
    Interpolant {
        kind: InterpolantKind::CubicSpline(boundary),
        knots: knots.clone(),
        segments,
    }
}

/// Thomas algorithm. `sub[i]` couples rows `i + 1` and `i`, `sup[i]` rows `i` and `i + 1`.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], mut rhs: Vec<f64>) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    for i in 1..n {
        let w = sub[i - 1] / d[i - 1];
        d[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= d[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / d[i];
    }
    rhs
}

/// Disjoint groups of `degree + 1` knots sharing their boundary knots, each
/// fitted by its interpolating polynomial. `(knots - 1)` must be divisible
/// by `degree`.
pub fn fit_lagrange_piecewise(knots: &Knots, degree: usize) -> Result<Interpolant> {
    check_degree(degree)?;
    let n = knots.len();
    if (n - 1) % degree != 0 {
        return Err(EmdError::SegmentMismatch { knots: n, degree });
    }
    let p = knots.points();
    let segments = (0..(n - 1) / degree)
        .map(|g| {
            let group = &p[g * degree..=(g + 1) * degree];
            lagrange_segment(group, group[0].t, group[degree].t)
        })
        .collect();
    Ok(Interpolant {
        kind: InterpolantKind::PiecewiseLagrange(degree),
        knots: knots.clone(),
        segments,
    })
}

/// Like [`fit_lagrange_piecewise`] but accepts any knot count: when the
/// groups do not divide evenly, the last segment uses the final
/// `degree + 1` knots and covers only the remaining span.
pub fn fit_lagrange_covering(knots: &Knots, degree: usize) -> Result<Interpolant> {
    check_degree(degree)?;
    let n = knots.len();
    if n < degree + 1 {
        // too few knots for the requested degree: drop to the highest that fits
        return fit_lagrange_covering(knots, n - 1);
    }
    if (n - 1) % degree == 0 {
        return fit_lagrange_piecewise(knots, degree);
    }
    let p = knots.points();
    let full = (n - 1) / degree;
    let mut segments: Vec<Segment> = (0..full)
        .map(|g| {
            let group = &p[g * degree..=(g + 1) * degree];
            lagrange_segment(group, group[0].t, group[degree].t)
        })
        .collect();
    let covered = full * degree;
    segments.push(lagrange_segment(
        &p[n - 1 - degree..],
        p[covered].t,
        p[n - 1].t,
    ));
    Ok(Interpolant {
        kind: InterpolantKind::PiecewiseLagrange(degree),
        knots: knots.clone(),
        segments,
    })
}

fn check_degree(degree: usize) -> Result<()> {
    if (1..=3).contains(&degree) {
        Ok(())
    } else {
        Err(EmdError::UnsupportedDegree(degree))
    }
}

/// Interpolating polynomial through `group`, expanded in powers of `t - t0`.
fn lagrange_segment(group: &[Point], t0: f64, t1: f64) -> Segment {
    let x: Vec<f64> = group.iter().map(|p| p.t - t0).collect();
    let k = group.len();
    // Newton divided differences
    let mut dd: Vec<f64> = group.iter().map(|p| p.v).collect();
    for j in 1..k {
        for i in (j..k).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (x[i] - x[i - j]);
        }
    }
    // expand a0 + (s-x0)(a1 + (s-x1)(a2 + (s-x2) a3)) from the inside out
    let mut c = [0.0; 4];
    c[0] = dd[k - 1];
    for i in (0..k - 1).rev() {
        // c <- c * (s - x[i]) + dd[i]
        let mut next = [0.0; 4];
        for d in 0..3 {
            next[d + 1] += c[d];
            next[d] -= x[i] * c[d];
        }
        next[0] += dd[i];
        c = next;
    }
    Segment { t0, t1, c }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(pairs: &[(f64, f64)]) -> Knots {
        Knots::new(pairs.iter().map(|&(t, v)| Point::new(t, v)).collect()).unwrap()
    }

    /// Brute-force natural spline on 3 knots: 8 unknowns (two cubics in
    /// global t), dense Gaussian elimination.
    fn brute_force_natural_3(p: [(f64, f64); 3], t: f64) -> f64 {
        let row = |t: f64, off: usize, d: usize| -> [f64; 8] {
            let mut r = [0.0; 8];
            let basis = match d {
                0 => [1.0, t, t * t, t * t * t],
                1 => [0.0, 1.0, 2.0 * t, 3.0 * t * t],
                _ => [0.0, 0.0, 2.0, 6.0 * t],
            };
            r[off..off + 4].copy_from_slice(&basis);
            r
        };
        let sub = |a: [f64; 8], b: [f64; 8]| -> [f64; 8] {
            let mut r = [0.0; 8];
            for i in 0..8 {
                r[i] = a[i] - b[i];
            }
            r
        };
        let (x0, x1, x2) = (p[0].0, p[1].0, p[2].0);
        let mut a: Vec<[f64; 9]> = Vec::new();
        let mut push = |r: [f64; 8], rhs: f64| {
            let mut full = [0.0; 9];
            full[..8].copy_from_slice(&r);
            full[8] = rhs;
            a.push(full);
        };
        push(row(x0, 0, 0), p[0].1);
        push(row(x1, 0, 0), p[1].1);
        push(row(x1, 4, 0), p[1].1);
        push(row(x2, 4, 0), p[2].1);
        push(sub(row(x1, 0, 1), row(x1, 4, 1)), 0.0);
        push(sub(row(x1, 0, 2), row(x1, 4, 2)), 0.0);
        push(row(x0, 0, 2), 0.0);
        push(row(x2, 4, 2), 0.0);
        for col in 0..8 {
            let piv = (col..8)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            for r in 0..8 {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..9 {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        let coef: Vec<f64> = (0..8).map(|i| a[i][8] / a[i][i]).collect();
        let off = if t <= x1 { 0 } else { 4 };
        coef[off] + coef[off + 1] * t + coef[off + 2] * t * t + coef[off + 3] * t * t * t
    }

    #[test]
    fn three_knot_spline_matches_brute_force() {
        let expected = brute_force_natural_3([(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)], 0.5);
        assert!((expected - 0.6875).abs() < 1e-14);
        let s = fit_spline(&knots(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]));
        assert!((s.eval(0.5).unwrap() - expected).abs() < 1e-14);

        let pts = [(-0.3, 1.2), (0.4, -0.7), (2.1, 0.35)];
        let s = fit_spline(&knots(&pts));
        for t in [-0.1, 0.2, 0.9, 1.7] {
            assert!((s.eval(t).unwrap() - brute_force_natural_3(pts, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_spline_reproduces_cubics() {
        let f = |t: f64| 0.5 - t + 0.3 * t * t - 0.2 * t * t * t;
        let df = |t: f64| -1.0 + 0.6 * t - 0.6 * t * t;
        let pts: Vec<(f64, f64)> = [-1.0, -0.2, 0.5, 1.4, 2.0]
            .iter()
            .map(|&t| (t, f(t)))
            .collect();
        let s = fit_spline_with(
            &knots(&pts),
            SplineBoundary::Clamped {
                left: df(-1.0),
                right: df(2.0),
            },
        );
        for i in 0..=60 {
            let t = -1.0 + 3.0 * i as f64 / 60.0;
            assert!((s.eval(t).unwrap() - f(t)).abs() < 1e-12);
        }
        let two = fit_spline_with(
            &knots(&[(0.0, 0.0), (1.0, 0.0)]),
            SplineBoundary::Clamped {
                left: 1.0,
                right: 1.0,
            },
        );
        assert!((two.derivative(0.0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((two.derivative(1.0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_knot_spline_is_a_line() {
        let s = fit_spline(&knots(&[(0.0, 0.0), (2.0, 4.0)]));
        assert_eq!(s.eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn spline_has_linear_precision() {
        let pts: Vec<(f64, f64)> = [0.0, 0.3, 1.1, 1.5, 2.9, 4.0]
            .iter()
            .map(|&t| (t, 2.0 - 0.7 * t))
            .collect();
        let s = fit_spline(&knots(&pts));
        for i in 0..=100 {
            let t = 4.0 * i as f64 / 100.0;
            assert!((s.eval(t).unwrap() - (2.0 - 0.7 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicate_and_unordered_knots_rejected() {
        let dup = Knots::new(vec![Point::new(0.0, 1.0), Point::new(0.0, 2.0)]);
        assert_eq!(dup, Err(EmdError::DuplicateKnot(0.0)));
        let bad = Knots::new(vec![Point::new(1.0, 1.0), Point::new(0.0, 2.0)]);
        assert_eq!(bad, Err(EmdError::UnorderedKnots(1)));
    }

    #[test]
    fn eval_outside_domain() {
        let s = fit_spline(&knots(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]));
        assert!(matches!(s.eval(2.5), Err(EmdError::OutOfDomain { .. })));
        assert!(matches!(s.eval(-0.1), Err(EmdError::OutOfDomain { .. })));
        assert_eq!(s.eval(1.0).unwrap(), 1.0);
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let f = |t: f64| t * t * t - t;
        let pts: Vec<(f64, f64)> = [-1.3, -0.2, 0.5, 1.7].iter().map(|&t| (t, f(t))).collect();
        let l = fit_lagrange_piecewise(&knots(&pts), 3).unwrap();
        for i in 0..=50 {
            let t = -1.3 + 3.0 * i as f64 / 50.0;
            assert!((l.eval(t).unwrap() - f(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn lagrange_segment_structure() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, (i as f64 * 0.9).sin())).collect();
        let l = fit_lagrange_piecewise(&knots(&pts), 2).unwrap();
        assert_eq!(l.breakpoints(), vec![0.0, 2.0, 4.0]);
        for &(t, v) in &pts {
            assert!((l.eval(t).unwrap() - v).abs() < 1e-14);
        }
        assert_eq!(
            fit_lagrange_piecewise(&knots(&pts), 3),
            Err(EmdError::SegmentMismatch {
                knots: 5,
                degree: 3
            })
        );
        assert_eq!(
            fit_lagrange_piecewise(&knots(&pts), 4),
            Err(EmdError::UnsupportedDegree(4))
        );

        let l = fit_lagrange_piecewise(&knots(&pts), 1).unwrap();
        assert!((l.eval(0.5).unwrap() - 0.5 * pts[1].1).abs() < 1e-15);
    }

    #[test]
    fn covering_handles_leftover_knots() {
        let f = |t: f64| 1.0 + t - 0.5 * t * t;
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| (i as f64 * 0.7, f(i as f64 * 0.7)))
            .collect();
        let l = fit_lagrange_covering(&knots(&pts), 2).unwrap();
        assert_eq!(l.breakpoints().len(), 4);
        for i in 0..=35 {
            let t = 3.5 * i as f64 / 35.0;
            assert!((l.eval(t).unwrap() - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_extension() {
        let k = knots(&[(1.0, 5.0), (3.0, 6.0), (6.0, 7.0), (8.0, 8.0)]);
        let m = k.mirror_extended(0.0, 9.0, 2).unwrap();
        let ts: Vec<f64> = m.points().iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![-3.0, -1.0, 1.0, 3.0, 6.0, 8.0, 10.0, 12.0]);
        assert_eq!(m.points()[0].v, 6.0);
        assert_eq!(m.points()[7].v, 7.0);
        // knot sitting on the boundary is not duplicated
        let k = knots(&[(0.0, 1.0), (2.0, 2.0), (4.0, 3.0)]);
        let m = k.mirror_extended(0.0, 4.0, 2).unwrap();
        let ts: Vec<f64> = m.points().iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![-2.0, 0.0, 2.0, 4.0, 6.0]);
    }
}
