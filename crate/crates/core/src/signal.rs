//! Uniform time grids, parametric tone signals and discrete norms.

use std::fmt::Write as _;

use crate::error::{EmdError, Result};

/// Relative tolerance for deciding that a span is an integer number of steps.
const SPAN_TOLERANCE: f64 = 1e-9;

/// A `(t, v)` pair: a knot, an extremum or a midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub v: f64,
}

impl Point {
    pub fn new(t: f64, v: f64) -> Self {
        Self { t, v }
    }
}

/// Uniform sampling grid. Times are always computed as `t_start + k * dt`
/// so there is no accumulated drift along long grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(EmdError::InvalidStep(dt));
        }
        if !t_start.is_finite() {
            return Err(EmdError::InvalidGrid(format!("non-finite start {t_start}")));
        }
        if n < 2 {
            return Err(EmdError::InvalidGrid(format!(
                "need at least 2 samples, got {n}"
            )));
        }
        Ok(Self { t_start, dt, n })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }

    /// Trapezoidal quadrature weight of sample `k` (already multiplied by dt).
    #[inline]
    pub fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k == self.n - 1 {
            0.5 * self.dt
        } else {
            self.dt
        }
    }
}

/// Builds the grid `t_start, t_start + dt, ..., t_end`.
pub fn make_grid(t_start: f64, t_end: f64, dt: f64) -> Result<TimeGrid> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(EmdError::InvalidStep(dt));
    }
    if !(t_start.is_finite() && t_end.is_finite()) || t_end <= t_start {
        return Err(EmdError::InvalidGrid(format!(
            "need finite t_end > t_start, got [{t_start}, {t_end}]"
        )));
    }
    let span = t_end - t_start;
    let steps = span / dt;
    let rounded = steps.round();
    if (steps - rounded).abs() > SPAN_TOLERANCE * rounded.max(1.0) {
        return Err(EmdError::NonIntegerSpan { span, dt });
    }
    TimeGrid::new(t_start, dt, rounded as usize + 1)
}

/// One cosine component `amplitude * cos(omega * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Tone {
    pub fn new(amplitude: f64, omega: f64, phase: f64) -> Self {
        Self {
            amplitude,
            omega,
            phase,
        }
    }

    pub fn cos(amplitude: f64, omega: f64) -> Self {
        Self::new(amplitude, omega, 0.0)
    }
}

/// Deterministic perturbation tone `epsilon * cos(nu * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTone {
    pub epsilon: f64,
    pub nu: f64,
}

/// A finite sum of tones plus an optional perturbation tone.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneRecipe {
    tones: Vec<Tone>,
    noise: Option<NoiseTone>,
}

impl ToneRecipe {
    pub fn new(tones: Vec<Tone>, noise: Option<NoiseTone>) -> Result<Self> {
        if tones.is_empty() {
            return Err(EmdError::InvalidRecipe(
                "at least one tone is required".into(),
            ));
        }
        for (i, tone) in tones.iter().enumerate() {
            if !(tone.omega.is_finite() && tone.omega > 0.0) {
                return Err(EmdError::InvalidRecipe(format!(
                    "tone {i} has non-positive frequency {}",
                    tone.omega
                )));
            }
            if !(tone.amplitude.is_finite() && tone.phase.is_finite()) {
                return Err(EmdError::InvalidRecipe(format!("tone {i} is not finite")));
            }
        }
        if let Some(noise) = noise {
            if !(noise.nu.is_finite() && noise.nu > 0.0 && noise.epsilon.is_finite()) {
                return Err(EmdError::InvalidRecipe(format!("bad noise tone {noise:?}")));
            }
        }
        Ok(Self { tones, noise })
    }

    /// Equal-weight sum `(1/N) * sum cos(omega_i t)`.
    pub fn equal_weights(omegas: &[f64]) -> Result<Self> {
        let w = 1.0 / omegas.len().max(1) as f64;
        Self::new(omegas.iter().map(|&o| Tone::cos(w, o)).collect(), None)
    }

    pub fn with_noise(mut self, epsilon: f64, nu: f64) -> Result<Self> {
        self.noise = Some(NoiseTone { epsilon, nu });
        Self::new(self.tones, self.noise)
    }

    pub fn tones(&self) -> &[Tone] {
        &self.tones
    }

    pub fn noise(&self) -> Option<NoiseTone> {
        self.noise
    }

    /// Frequencies of the main tones (the noise tone excluded).
    pub fn omegas(&self) -> Vec<f64> {
        self.tones.iter().map(|t| t.omega).collect()
    }

    /// Concatenates two recipes. Noise tones are kept only if at most one side has one.
    pub fn merged(&self, other: &ToneRecipe) -> Result<Self> {
        let noise = match (self.noise, other.noise) {
            (Some(_), Some(_)) => {
                return Err(EmdError::InvalidRecipe(
                    "cannot merge two noise tones".into(),
                ))
            }
            (a, b) => a.or(b),
        };
        let mut tones = self.tones.clone();
        tones.extend_from_slice(&other.tones);
        Self::new(tones, noise)
    }
}

/// A signal known in closed form, with its first two derivatives.
pub trait ContinuousSignal {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    fn second_derivative(&self, t: f64) -> f64;
}

impl ContinuousSignal for ToneRecipe {
    fn value(&self, t: f64) -> f64 {
        let mut v: f64 = self
            .tones
            .iter()
            .map(|c| c.amplitude * (c.omega * t + c.phase).cos())
            .sum();
        if let Some(n) = self.noise {
            v += n.epsilon * (n.nu * t).cos();
        }
        v
    }

    fn derivative(&self, t: f64) -> f64 {
        let mut v: f64 = self
            .tones
            .iter()
            .map(|c| -c.amplitude * c.omega * (c.omega * t + c.phase).sin())
            .sum();
        if let Some(n) = self.noise {
            v -= n.epsilon * n.nu * (n.nu * t).sin();
        }
        v
    }

    fn second_derivative(&self, t: f64) -> f64 {
        let mut v: f64 = self
            .tones
            .iter()
            .map(|c| -c.amplitude * c.omega * c.omega * (c.omega * t + c.phase).cos())
            .sum();
        if let Some(n) = self.noise {
            v -= n.epsilon * n.nu * n.nu * (n.nu * t).cos();
        }
        v
    }
}

/// Constant signal; the zero-frequency case that `ToneRecipe` excludes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ContinuousSignal for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
    fn second_derivative(&self, _t: f64) -> f64 {
        0.0
    }
}

/// Uniformly sampled, finite-valued time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(EmdError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(EmdError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.time(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid.times()
    }

    /// Linear interpolation between the two samples bracketing `t`,
    /// clamped to the end samples outside the grid span.
    pub fn value_at(&self, t: f64) -> f64 {
        let g = &self.grid;
        let x = (t - g.t_start()) / g.dt();
        if x <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if x >= last as f64 {
            return self.values[last];
        }
        let k = (x.floor() as usize).min(last - 1);
        let frac = (t - g.time(k)) / g.dt();
        self.values[k] + frac * (self.values[k + 1] - self.values[k])
    }

    /// Pointwise `self - other`; both signals must share the grid.
    pub fn sub(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(
        &self,
        other: &SampledSignal,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SampledSignal> {
        if self.grid != other.grid {
            return Err(EmdError::InvalidGrid(
                "signals live on different grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        SampledSignal::new(self.grid, values)
    }

    /// Serialises as `t,value` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 48);
        out.push_str("t,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", fmt_f64(self.grid.time(k)), fmt_f64(*v));
        }
        out
    }

    /// Parses the `t,value` CSV format. The time column must be uniform.
    pub fn from_csv(text: &str) -> Result<SampledSignal> {
        let malformed = |line: u64, reason: String| EmdError::MalformedCsv {
            line: line as usize,
            reason,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| malformed(1, e.to_string()))?
            .clone();
        let hline = header.position().map_or(1, |p| p.line());
        if header.is_empty() {
            return Err(malformed(1, "empty input".into()));
        }
        if header.iter().collect::<Vec<_>>() != ["t", "value"] {
            return Err(malformed(
                hline,
                format!(
                    "expected header `t,value`, found `{}`",
                    header.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                malformed(line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| malformed(line, format!("`{s}`: {e}")))
            };
            ts.push(parse(&rec[0])?);
            vs.push(parse(&rec[1])?);
        }
        let hline = hline as usize;
        if ts.len() < 2 {
            return Err(EmdError::MalformedCsv {
                line: hline + 1,
                reason: format!("need at least 2 samples, found {}", ts.len()),
            });
        }
        let n = ts.len();
        let dt = (ts[n - 1] - ts[0]) / (n - 1) as f64;
        let grid = TimeGrid::new(ts[0], dt, n).map_err(|e| EmdError::MalformedCsv {
            line: hline + 2,
            reason: e.to_string(),
        })?;
        for (k, &t) in ts.iter().enumerate() {
            if (t - grid.time(k)).abs() > 1e-9 * dt.max(t.abs()) {
                return Err(EmdError::MalformedCsv {
                    line: hline + 2 + k,
                    reason: format!("non-uniform time {t}, expected {}", grid.time(k)),
                });
            }
        }
        SampledSignal::new(grid, vs).map_err(|e| EmdError::MalformedCsv {
            line: 0,
            reason: e.to_string(),
        })
    }
}

/// 17 significant digits, enough for a lossless f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Samples a recipe on a grid.
pub fn synthesize(recipe: &ToneRecipe, grid: &TimeGrid) -> SampledSignal {
    let values = (0..grid.len())
        .map(|k| recipe.value(grid.time(k)))
        .collect();
    SampledSignal {
        grid: *grid,
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Sup,
}

/// Discrete norm; L1 and L2 use trapezoidal weights so they approximate the
/// continuous integrals over the grid span.
pub fn signal_norm(s: &SampledSignal, kind: NormKind) -> f64 {
    let g = s.grid();
    match kind {
        NormKind::Sup => s.values.iter().fold(0.0, |m, v| m.max(v.abs())),
        NormKind::L1 => s
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| g.trapezoid_weight(k) * v.abs())
            .sum(),
        NormKind::L2 => s
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| g.trapezoid_weight(k) * v * v)
            .sum::<f64>()
            .sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn three_tone() -> ToneRecipe {
        let w0 = PI / 256.0;
        ToneRecipe::equal_weights(&[12.0 * w0, 10.0 * w0, 8.0 * w0]).unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(make_grid(-2048.0, 2048.0, 1.0).unwrap().len(), 4097);
        let g = make_grid(0.0, 1.0, 0.5).unwrap();
        assert_eq!(g.times(), vec![0.0, 0.5, 1.0]);
        assert!(matches!(
            make_grid(0.0, 1.0, 0.3),
            Err(EmdError::NonIntegerSpan { .. })
        ));
        assert!(matches!(
            make_grid(0.0, 1.0, 0.0),
            Err(EmdError::InvalidStep(_))
        ));
        assert!(matches!(
            make_grid(0.0, 1.0, -0.1),
            Err(EmdError::InvalidStep(_))
        ));
    }

    #[test]
    fn grid_times_have_no_drift() {
        let g = make_grid(-2048.0, 2048.0, 0.1).unwrap();
        assert_eq!(g.t_end(), 2048.0);
        assert_eq!(g.time(20480), 0.0);
    }

    #[test]
    fn synthesize_examples() {
        let g = make_grid(-2048.0, 2048.0, 1.0).unwrap();
        let s = synthesize(&three_tone(), &g);
        assert!((s.values()[2048] - 1.0).abs() < 1e-15);

        let w = 0.3;
        let r = ToneRecipe::new(vec![Tone::cos(1.0, w)], None).unwrap();
        assert!((r.value(PI / w) + 1.0).abs() < 1e-15);

        let r = ToneRecipe::equal_weights(&[3.0 * PI / 64.0, PI / 32.0]).unwrap();
        assert!((r.value(128.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recipe_validation() {
        assert!(ToneRecipe::new(vec![], None).is_err());
        assert!(ToneRecipe::new(vec![Tone::cos(1.0, 0.0)], None).is_err());
        assert!(ToneRecipe::new(vec![Tone::cos(1.0, -1.0)], None).is_err());
    }

    #[test]
    fn norms() {
        let g = make_grid(0.0, 100.0, 0.01).unwrap();
        let z = SampledSignal::zeros(g);
        for kind in [NormKind::L1, NormKind::L2, NormKind::Sup] {
            assert_eq!(signal_norm(&z, kind), 0.0);
        }
        // cos over exactly 3 periods: L2^2 = 3T/2
        let w = 2.0 * PI / 10.0;
        let g = make_grid(0.0, 30.0, 0.01).unwrap();
        let s = SampledSignal::from_fn(g, |t| (w * t).cos()).unwrap();
        let l2 = signal_norm(&s, NormKind::L2);
        let exact = (30.0f64 / 2.0).sqrt();
        assert!((l2 - exact).abs() / exact < 10.0 * 0.01 * 0.01);

        let g = make_grid(-2048.0, 2048.0, 1.0).unwrap();
        let s = synthesize(&three_tone(), &g);
        let sup = signal_norm(&s, NormKind::Sup);
        assert!(sup > 0.0 && sup <= 1.0);
        assert_eq!(sup, s.values()[2048].abs());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let g = make_grid(-1.0, 1.0, 0.25).unwrap();
        let s = SampledSignal::from_fn(g, |t| (3.7 * t).sin() / 3.0).unwrap();
        let back = SampledSignal::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.values(), s.values());
        assert!(matches!(
            SampledSignal::from_csv(""),
            Err(EmdError::MalformedCsv { line: 1, .. })
        ));
        assert!(matches!(
            SampledSignal::from_csv("t,value\n0,1\n1,x\n"),
            Err(EmdError::MalformedCsv { line: 3, .. })
        ));
        assert!(matches!(
            SampledSignal::from_csv("t,value\n0,1\n1,2\n3,3\n"),
            Err(EmdError::MalformedCsv { .. })
        ));
    }

    #[test]
    fn value_at_interpolates() {
        let g = make_grid(0.0, 2.0, 1.0).unwrap();
        let s = SampledSignal::new(g, vec![1.0, 0.0, -1.0]).unwrap();
        assert_eq!(s.value_at(1.0), 0.0);
        assert_eq!(s.value_at(0.5), 0.5);
        assert_eq!(s.value_at(1.75), -0.75);
    }
}
