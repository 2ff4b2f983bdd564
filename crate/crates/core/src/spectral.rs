//! Tone projections by trapezoidal quadrature and DFT periodograms.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{EmdError, Result};
use crate::signal::{fmt_f64, SampledSignal};

/// Slack when checking a projection interval against the grid span.
const SPAN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    pub omega: f64,
    pub interval: (f64, f64),
    pub p_cos: f64,
    pub p_sin: f64,
    pub amplitude: f64,
}

/// `∫ s(t) cos(ωt) dt` and `∫ s(t) sin(ωt) dt` over `[t_lo, t_hi]`.
pub fn project_onto_tone(
    s: &SampledSignal,
    omega: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<ProjectionReport> {
    project_onto_tone_phased(s, omega, 0.0, t_lo, t_hi)
}

/// Projection onto the rotated probe pair `cos(ωt + φ)`, `sin(ωt + φ)`.
pub fn project_onto_tone_phased(
    s: &SampledSignal,
    omega: f64,
    phase: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<ProjectionReport> {
    let p_cos = trapezoid(s, t_lo, t_hi, |t| (omega * t + phase).cos())?;
    let p_sin = trapezoid(s, t_lo, t_hi, |t| (omega * t + phase).sin())?;
    Ok(ProjectionReport {
        omega,
        interval: (t_lo, t_hi),
        p_cos,
        p_sin,
        amplitude: p_cos.hypot(p_sin),
    })
}

/// Trapezoid rule for `∫ s(t) w(t) dt` on the grid nodes inside the interval,
/// with linearly interpolated partial cells at either end.
pub fn trapezoid(s: &SampledSignal, t_lo: f64, t_hi: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
    let g = s.grid();
    let (start, end) = (g.t_start(), g.t_end());
    let slack = SPAN_SLACK * (end - start).abs().max(1.0);
    if !(t_lo <= t_hi) || t_lo < start - slack || t_hi > end + slack {
        return Err(EmdError::IntervalOutOfRange {
            lo: t_lo,
            hi: t_hi,
            start,
            end,
        });
    }
    let (t_lo, t_hi) = (t_lo.max(start), t_hi.min(end));
    if t_hi == t_lo {
        return Ok(0.0);
    }
    let dt = g.dt();
    let n = g.len();
    // first node at or after t_lo, last node at or before t_hi
    let eps = 1e-9;
    let mut first = ((t_lo - start) / dt - eps).ceil().max(0.0) as usize;
    let mut last = (((t_hi - start) / dt + eps).floor() as usize).min(n - 1);
    if g.time(first) < t_lo {
        first += 1;
    }
    if g.time(last) > t_hi {
        last = last.saturating_sub(1);
    }
    let f = |t: f64| s.value_at(t) * w(t);
    if first > last {
        // interval inside a single cell
        return Ok(0.5 * (t_hi - t_lo) * (f(t_lo) + f(t_hi)));
    }
    let v = s.values();
    let node = |k: usize| v[k] * w(g.time(k));
    let mut sum = 0.0;
    let mut prev = node(first);
    for k in first + 1..=last {
        let cur = node(k);
        sum += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    let (a, b) = (g.time(first), g.time(last));
    if a > t_lo {
        sum += 0.5 * (a - t_lo) * (f(t_lo) + node(first));
    }
    if t_hi > b {
        sum += 0.5 * (t_hi - b) * (node(last) + f(t_hi));
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Positive DFT frequencies `k * bin_width`, `k = 1..=n/2`.
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub peak_freq: f64,
    pub peak_power: f64,
    pub bin_width: f64,
    /// Peak frequency from a parabola through the peak bin and its neighbours.
    pub refined_peak_freq: f64,
    /// Length of the transformed signal.
    pub n: usize,
    pub dt: f64,
}

impl SpectrumReport {
    /// `dt * sum |x|^2` recovered from the one-sided periodogram.
    pub fn energy(&self) -> f64 {
        let mut total = 2.0 * self.power.iter().sum::<f64>();
        if self.n % 2 == 0 {
            // the Nyquist bin has no mirror image
            total -= self.power.last().copied().unwrap_or(0.0);
        }
        total * self.dt
    }

    /// Frequencies of the `count` strongest local maxima, strongest first.
    pub fn dominant_peaks(&self, count: usize) -> Vec<f64> {
        let p = &self.power;
        let mut peaks: Vec<usize> = (0..p.len())
            .filter(|&k| {
                let left = if k == 0 { 0.0 } else { p[k - 1] };
                let right = p.get(k + 1).copied().unwrap_or(0.0);
                p[k] > 0.0 && p[k] >= left && p[k] > right
            })
            .collect();
        peaks.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
        peaks
            .into_iter()
            .take(count)
            .map(|k| self.freqs[k])
            .collect()
    }

    /// `freq_rad_per_time,power`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_rad_per_time,power\n");
        for (f, p) in self.freqs.iter().zip(&self.power) {
            out.push_str(&fmt_f64(*f));
            out.push(',');
            out.push_str(&fmt_f64(*p));
            out.push('\n');
        }
        out
    }
}

/// Periodogram `|X_k|^2 / n` over positive frequencies, after mean removal.
pub fn power_spectrum(s: &SampledSignal) -> Result<SpectrumReport> {
    power_spectrum_windowed(s, Window::Rectangular)
}

pub fn power_spectrum_windowed(s: &SampledSignal, window: Window) -> Result<SpectrumReport> {
    let n = s.len();
    if n < 4 {
        return Err(EmdError::TooFewSamples { needed: 4, got: n });
    }
    let mean = s.values().iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = s
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = match window {
                Window::Rectangular => 1.0,
                Window::Hann => 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos(),
            };
            Complex::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let dt = s.grid().dt();
    let bin_width = 2.0 * PI / (n as f64 * dt);
    let half = n / 2;
    let freqs: Vec<f64> = (1..=half).map(|k| k as f64 * bin_width).collect();
    let power: Vec<f64> = (1..=half).map(|k| buf[k].norm_sqr() / n as f64).collect();

    let (peak_idx, peak_power) =
        power
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, p)| {
                if p > best.1 {
                    (k, p)
                } else {
                    best
                }
            });
    let peak_freq = freqs[peak_idx];
    let refined_peak_freq = if peak_idx > 0 && peak_idx + 1 < power.len() {
        let (a, b, c) = (power[peak_idx - 1], power[peak_idx], power[peak_idx + 1]);
        let curvature = a - 2.0 * b + c;
        if curvature < 0.0 {
            peak_freq + (0.5 * (a - c) / curvature).clamp(-0.5, 0.5) * bin_width
        } else {
            peak_freq
        }
    } else {
        peak_freq
    };
    Ok(SpectrumReport {
        freqs,
        power,
        peak_freq,
        peak_power,
        bin_width,
        refined_peak_freq,
        n,
        dt,
    })
}

/// `|peak_freq - target| / bin_width`
pub fn spectral_peak_distance(spec: &SpectrumReport, target_omega: f64) -> f64 {
    (spec.peak_freq - target_omega).abs() / spec.bin_width
}

/// Like [`spectral_peak_distance`] using the refined peak.
pub fn refined_peak_distance(spec: &SpectrumReport, target_omega: f64) -> f64 {
    (spec.refined_peak_freq - target_omega).abs() / spec.bin_width
}
