//! Local extrema and the midpoints between consecutive extrema.

use crate::error::{EmdError, Result};
use crate::signal::{Point, SampledSignal};

/// Largest sub-sample shift applied by parabolic refinement, in samples.
/// Kept below 0.5 so adjacent refined extrema stay strictly ordered.
const MAX_REFINE_SHIFT: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub v: f64,
    /// Sample index the extremum was detected at (plateau center for plateaus).
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// Local maxima and minima in increasing time order. The two lists interleave.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtremaSet {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
}

impl ExtremaSet {
    pub fn total(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }

    /// All extrema merged in time order.
    pub fn merged(&self) -> Vec<(ExtremumKind, Extremum)> {
        let mut all: Vec<_> = self
            .maxima
            .iter()
            .map(|e| (ExtremumKind::Maximum, *e))
            .chain(self.minima.iter().map(|e| (ExtremumKind::Minimum, *e)))
            .collect();
        all.sort_by(|a, b| a.1.t.total_cmp(&b.1.t));
        all
    }

    /// True when maxima and minima strictly alternate in time.
    pub fn is_interleaved(&self) -> bool {
        let merged = self.merged();
        merged
            .windows(2)
            .all(|w| w[0].0 != w[1].0 && w[0].1.t < w[1].1.t)
    }

    pub fn maxima_points(&self) -> Vec<Point> {
        self.maxima.iter().map(|e| Point::new(e.t, e.v)).collect()
    }

    pub fn minima_points(&self) -> Vec<Point> {
        self.minima.iter().map(|e| Point::new(e.t, e.v)).collect()
    }
}

/// Midpoints between consecutive extrema, with the signal value there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MidpointSet {
    pub points: Vec<Point>,
}

impl MidpointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Finds interior local extrema. Runs of equal samples are collapsed first,
/// so a plateau yields one extremum at its center index, and a plateau that
/// is merely a step is not an extremum. Endpoints are never extrema.
pub fn find_extrema(s: &SampledSignal) -> Result<ExtremaSet> {
    let v = s.values();
    let n = v.len();
    if n < 3 {
        return Err(EmdError::TooFewSamples { needed: 3, got: n });
    }
    // (first index, last index) of each run of equal values
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || v[k] != v[start] {
            runs.push((start, k - 1));
            start = k;
        }
    }

    let mut set = ExtremaSet::default();
    for r in 1..runs.len().saturating_sub(1) {
        let (lo, hi) = runs[r];
        let here = v[lo];
        let before = v[runs[r - 1].0];
        let after = v[runs[r + 1].0];
        let center = (lo + hi) / 2;
        let e = Extremum {
            t: s.grid().time(center),
            v: here,
            index: center,
        };
        if here > before && here > after {
            set.maxima.push(e);
        } else if here < before && here < after {
            set.minima.push(e);
        }
    }
    if set.maxima.is_empty() || set.minima.is_empty() {
        return Err(EmdError::NoExtrema);
    }
    debug_assert!(set.is_interleaved());
    Ok(set)
}

/// Moves each extremum to the vertex of the parabola through its sample and
/// the two neighbours. Plateau extrema are left untouched.
pub fn refine_extrema(s: &SampledSignal, set: &ExtremaSet) -> ExtremaSet {
    let refine = |e: &Extremum| -> Extremum {
        let v = s.values();
        let k = e.index;
        if k == 0 || k + 1 >= v.len() || v[k - 1] == v[k] || v[k + 1] == v[k] {
            return *e;
        }
        let (a, b, c) = (v[k - 1], v[k], v[k + 1]);
        let curvature = a - 2.0 * b + c;
        if curvature == 0.0 {
            return *e;
        }
        let shift = (0.5 * (a - c) / curvature).clamp(-MAX_REFINE_SHIFT, MAX_REFINE_SHIFT);
        Extremum {
            t: e.t + shift * s.grid().dt(),
            v: b - 0.25 * (a - c) * shift,
            index: k,
        }
    };
    ExtremaSet {
        maxima: set.maxima.iter().map(refine).collect(),
        minima: set.minima.iter().map(refine).collect(),
    }
}

/// For every pair of consecutive extrema, the midpoint time and the signal
/// value there by linear interpolation between the bracketing samples.
pub fn compute_midpoints(s: &SampledSignal, e: &ExtremaSet) -> Result<MidpointSet> {
    let merged = e.merged();
    if merged.len() < 2 {
        return Err(EmdError::InsufficientExtrema {
            maxima: e.maxima.len(),
            minima: e.minima.len(),
        });
    }
    let points = merged
        .windows(2)
        .map(|w| {
            let t = 0.5 * (w[0].1.t + w[1].1.t);
            Point::new(t, s.value_at(t))
        })
        .collect();
    Ok(MidpointSet { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{make_grid, SampledSignal};
    use std::f64::consts::PI;

    #[test]
    fn cosine_extrema_near_multiples_of_pi() {
        let w = 0.37;
        let dt = 0.05;
        let g = make_grid(-1.0, 60.0, dt).unwrap();
        let s = SampledSignal::from_fn(g, |t| (w * t).cos()).unwrap();
        let e = find_extrema(&s).unwrap();
        assert!(e.is_interleaved());
        for m in &e.maxima {
            let k = (m.t * w / (2.0 * PI)).round();
            assert!((m.t - 2.0 * k * PI / w).abs() <= dt / 2.0 + 1e-12);
        }
        for m in &e.minima {
            let k = ((m.t * w / PI - 1.0) / 2.0).round();
            assert!((m.t - (2.0 * k + 1.0) * PI / w).abs() <= dt / 2.0 + 1e-12);
        }
    }

    #[test]
    fn constant_and_monotone_have_no_extrema() {
        let g = make_grid(0.0, 10.0, 1.0).unwrap();
        let c = SampledSignal::from_fn(g, |_| 2.0).unwrap();
        assert_eq!(find_extrema(&c), Err(EmdError::NoExtrema));
        let r = SampledSignal::from_fn(g, |t| t).unwrap();
        assert_eq!(find_extrema(&r), Err(EmdError::NoExtrema));
    }

    #[test]
    fn plateau_yields_single_centered_extremum() {
        let g = make_grid(0.0, 8.0, 1.0).unwrap();
        let s = SampledSignal::new(g, vec![0.0, 1.0, 3.0, 3.0, 3.0, 1.0, -1.0, 0.0, 0.5]).unwrap();
        let e = find_extrema(&s).unwrap();
        assert_eq!(e.maxima.len(), 1);
        assert_eq!(e.maxima[0].index, 3);
        assert_eq!(e.minima[0].index, 6);
        // a step is not an extremum
        let s = SampledSignal::new(g, vec![0.0, 1.0, 1.0, 2.0, 3.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let e = find_extrema(&s).unwrap();
        assert_eq!(
            e.maxima.iter().map(|m| m.index).collect::<Vec<_>>(),
            vec![4, 7]
        );
        assert_eq!(
            e.minima.iter().map(|m| m.index).collect::<Vec<_>>(),
            vec![6]
        );
    }

    #[test]
    fn midpoints_of_simple_pair() {
        let g = make_grid(0.0, 4.0, 1.0).unwrap();
        let s = SampledSignal::new(g, vec![0.0, 1.0, 0.0, -1.0, 0.0]).unwrap();
        let e = find_extrema(&s).unwrap();
        let m = compute_midpoints(&s, &e).unwrap();
        assert_eq!(m.points, vec![Point::new(2.0, 0.0)]);
    }

    #[test]
    fn midpoints_of_cosine_are_near_zero() {
        let w = 0.21;
        let dt = 0.1;
        let g = make_grid(0.0, 200.0, dt).unwrap();
        let s = SampledSignal::from_fn(g, |t| (w * t).cos()).unwrap();
        let e = find_extrema(&s).unwrap();
        let m = compute_midpoints(&s, &e).unwrap();
        assert_eq!(m.len(), e.total() - 1);
        // midpoint times are off by at most dt/2, plus linear interpolation error
        let bound = w * dt / 2.0 + (w * dt).powi(2) / 8.0;
        for p in &m.points {
            assert!(p.v.abs() <= bound, "{p:?}");
        }
        // refined extrema pin the midpoints to second order
        let r = refine_extrema(&s, &e);
        let m = compute_midpoints(&s, &r).unwrap();
        for p in &m.points {
            assert!(p.v.abs() <= (w * dt).powi(2), "{p:?}");
        }
    }

    #[test]
    fn refinement_recovers_true_peak() {
        let w = 0.3;
        let dt = 1.0;
        let g = make_grid(-40.0, 40.0, dt).unwrap();
        let s = SampledSignal::from_fn(g, |t| (w * (t - 0.3)).cos()).unwrap();
        let e = refine_extrema(&s, &find_extrema(&s).unwrap());
        let m = e
            .maxima
            .iter()
            .min_by(|a, b| a.t.abs().total_cmp(&b.t.abs()))
            .unwrap();
        assert!((m.t - 0.3).abs() < 0.01, "{m:?}");
        assert!((m.v - 1.0).abs() < 1e-3);
    }
}
