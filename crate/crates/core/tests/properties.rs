use std::f64::consts::PI;

use emd_core::extrema::ExtremumKind;
use emd_core::spectral::project_onto_tone_phased;
use emd_core::{
    compute_midpoints, decompose, find_extrema, fit_lagrange_piecewise, fit_spline, make_grid,
    power_spectrum, project_onto_tone, signal_norm, synthesize, Knots, NormKind, SampledSignal,
    SiftConfig, SiftMethod, TimeGrid, Tone, ToneRecipe,
};
use proptest::prelude::*;

fn tone() -> impl Strategy<Value = Tone> {
    (0.1f64..2.0, 0.05f64..1.5, -PI..PI).prop_map(|(a, w, p)| Tone::new(a, w, p))
}

fn recipe(max_tones: usize) -> impl Strategy<Value = ToneRecipe> {
    prop::collection::vec(tone(), 1..=max_tones).prop_map(|t| ToneRecipe::new(t, None).unwrap())
}

fn knots_strategy(min: usize, max: usize) -> impl Strategy<Value = Knots> {
    prop::collection::vec((0.05f64..1.0, -3.0f64..3.0), min..=max).prop_map(|steps| {
        let mut t = -1.0;
        let pts: (Vec<f64>, Vec<f64>) = steps
            .into_iter()
            .map(|(dt, v)| {
                t += dt;
                (t, v)
            })
            .unzip();
        Knots::from_slices(&pts.0, &pts.1).unwrap()
    })
}

fn second_derivative_from(c: &[f64; 4], x: f64) -> f64 {
    2.0 * c[2] + 6.0 * c[3] * x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesis_is_linear(r1 in recipe(3), r2 in recipe(3), start in -50.0f64..50.0) {
        let grid = TimeGrid::new(start, 0.25, 400).unwrap();
        let both = synthesize(&r1.merged(&r2).unwrap(), &grid);
        let sum = synthesize(&r1, &grid).add(&synthesize(&r2, &grid)).unwrap();
        for (a, b) in both.values().iter().zip(sum.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn grid_times_are_index_products(start in -1e4f64..1e4, dt in 1e-3f64..10.0, n in 2usize..5000) {
        let g = TimeGrid::new(start, dt, n).unwrap();
        for k in [0, n / 3, n / 2, n - 1] {
            prop_assert_eq!(g.time(k), start + k as f64 * dt);
        }
    }

    #[test]
    fn pure_tone_l2_over_whole_periods(w in 0.2f64..2.0, periods in 1usize..6, steps in 40usize..200) {
        let period = 2.0 * PI / w;
        let dt = period / steps as f64;
        let grid = TimeGrid::new(0.0, dt, periods * steps + 1).unwrap();
        let s = SampledSignal::from_fn(grid, |t| (w * t).cos()).unwrap();
        let exact = (periods as f64 * period / 2.0).sqrt();
        let got = signal_norm(&s, NormKind::L2);
        prop_assert!((got - exact).abs() / exact <= 10.0 * dt * dt, "{got} vs {exact}");
    }

    #[test]
    fn extrema_interleave_and_midpoints_count(r in recipe(4)) {
        let grid = make_grid(0.0, 200.0, 0.1).unwrap();
        let s = synthesize(&r, &grid);
        if let Ok(e) = find_extrema(&s) {
            prop_assert!(e.is_interleaved());
            let merged = e.merged();
            for w in merged.windows(2) {
                prop_assert!(w[0].0 != w[1].0);
                prop_assert!(w[0].1.t < w[1].1.t);
            }
            let m = compute_midpoints(&s, &e).unwrap();
            prop_assert_eq!(m.len(), e.maxima.len() + e.minima.len() - 1);
        }
    }

    #[test]
    fn halving_dt_moves_extrema_by_at_most_dt(w in 0.1f64..1.0, phase in -PI..PI, ratio in 1.7f64..3.0) {
        let f = |t: f64| (w * t + phase).cos() + 0.3 * (ratio * w * t).cos();
        let dt = 0.05;
        let coarse = find_extrema(&SampledSignal::from_fn(make_grid(0.0, 100.0, dt).unwrap(), f).unwrap()).unwrap();
        let fine = find_extrema(&SampledSignal::from_fn(make_grid(0.0, 100.0, dt / 2.0).unwrap(), f).unwrap()).unwrap();
        for (kind, e) in coarse.merged() {
            let near = fine
                .merged()
                .into_iter()
                .filter(|(k, _)| *k == kind)
                .map(|(_, x)| (x.t - e.t).abs())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(near <= dt + 1e-12, "{kind:?} at {} moved {near}", e.t);
        }
    }

    #[test]
    fn spline_interpolates_and_is_c2(k in knots_strategy(3, 12)) {
        let s = fit_spline(&k);
        for p in k.points() {
            prop_assert!((s.eval(p.t).unwrap() - p.v).abs() <= 1e-12 * (1.0 + p.v.abs()));
        }
        let coefs = s.coefficients();
        for pair in coefs.windows(2) {
            let (lo, hi, c) = pair[0];
            let (lo2, _, c2) = pair[1];
            prop_assert_eq!(hi, lo2);
            let h = hi - lo;
            let left_value = c[0] + c[1] * h + c[2] * h * h + c[3] * h * h * h;
            let left_slope = c[1] + 2.0 * c[2] * h + 3.0 * c[3] * h * h;
            let scale = 1.0 + c2[0].abs() + c2[1].abs() + c2[2].abs();
            prop_assert!((left_value - c2[0]).abs() <= 1e-9 * scale);
            prop_assert!((left_slope - c2[1]).abs() <= 1e-9 * scale);
            prop_assert!((second_derivative_from(&c, h) - 2.0 * c2[2]).abs() <= 1e-8 * scale);
        }
        // natural ends
        let (_, _, first) = coefs[0];
        let (lo, hi, last) = coefs[coefs.len() - 1];
        prop_assert!(first[2].abs() <= 1e-12 * (1.0 + first[1].abs()));
        prop_assert!(second_derivative_from(&last, hi - lo).abs() <= 1e-8 * (1.0 + last[3].abs()));
    }

    #[test]
    fn spline_of_odd_data_is_odd(half in knots_strategy(2, 6), probe in 0.0f64..1.0) {
        let mut pts: Vec<(f64, f64)> = half.points().iter().map(|p| (p.t + 1.2, p.v)).collect();
        let mirrored: Vec<(f64, f64)> = pts.iter().rev().map(|&(t, v)| (-t, -v)).collect();
        pts = mirrored.into_iter().chain(std::iter::once((0.0, 0.0))).chain(pts).collect();
        let (t, v): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let s = fit_spline(&Knots::from_slices(&t, &v).unwrap());
        let x = probe * t[t.len() - 1];
        let (a, b) = (s.eval(x).unwrap(), s.eval(-x).unwrap());
        prop_assert!((a + b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} {b}");
    }

    #[test]
    fn lagrange_reproduces_its_degree(degree in 1usize..=3, segs in 1usize..4, c in prop::array::uniform4(-2.0f64..2.0)) {
        let n = degree * segs + 1;
        let p = |t: f64| (0..=degree).map(|k| c[k] * t.powi(k as i32)).sum::<f64>();
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.7 + 0.05 * (i as f64).sin()).collect();
        let v: Vec<f64> = t.iter().map(|&x| p(x)).collect();
        let l = fit_lagrange_piecewise(&Knots::from_slices(&t, &v).unwrap(), degree).unwrap();
        for i in 0..50 {
            let x = (t[0] + (t[n - 1] - t[0]) * i as f64 / 49.0).min(t[n - 1]);
            prop_assert!((l.eval(x).unwrap() - p(x)).abs() <= 1e-10 * (1.0 + p(x).abs()));
        }
    }

    #[test]
    fn projection_is_linear(r1 in recipe(2), r2 in recipe(2), a in -2.0f64..2.0, w in 0.05f64..1.5) {
        let grid = make_grid(0.0, 60.0, 0.05).unwrap();
        let (s1, s2) = (synthesize(&r1, &grid), synthesize(&r2, &grid));
        let combo = SampledSignal::new(grid, s1.values().iter().zip(s2.values()).map(|(x, y)| a * x + y).collect()).unwrap();
        let (p1, p2) = (project_onto_tone(&s1, w, 3.3, 51.7).unwrap(), project_onto_tone(&s2, w, 3.3, 51.7).unwrap());
        let pc = project_onto_tone(&combo, w, 3.3, 51.7).unwrap();
        let tol = 1e-10 * (1.0 + pc.p_cos.abs() + pc.p_sin.abs());
        prop_assert!((pc.p_cos - (a * p1.p_cos + p2.p_cos)).abs() <= tol);
        prop_assert!((pc.p_sin - (a * p1.p_sin + p2.p_sin)).abs() <= tol);
    }

    #[test]
    fn amplitude_ignores_probe_phase(r in recipe(3), w in 0.05f64..1.5, phase in -PI..PI) {
        let s = synthesize(&r, &make_grid(-10.0, 50.0, 0.1).unwrap());
        let a = project_onto_tone(&s, w, -7.25, 44.0).unwrap().amplitude;
        let b = project_onto_tone_phased(&s, w, phase, -7.25, 44.0).unwrap().amplitude;
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{a} {b}");
    }

    #[test]
    fn parseval(r in recipe(4), n in 16usize..600, dt in 0.1f64..2.0) {
        let s = synthesize(&r, &TimeGrid::new(0.0, dt, n).unwrap());
        let mean = s.values().iter().sum::<f64>() / n as f64;
        let energy: f64 = dt * s.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let spec = power_spectrum(&s).unwrap();
        prop_assert!((spec.energy() - energy).abs() <= 1e-6 * energy.max(1e-300), "{} vs {energy}", spec.energy());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decomposition_reconstructs_exactly(r in recipe(4), method in prop::sample::select(vec![SiftMethod::Classical, SiftMethod::Midpoint, SiftMethod::Hybrid])) {
        let s = synthesize(&r, &make_grid(0.0, 300.0, 0.5).unwrap());
        let d = decompose(&s, &SiftConfig::new(method).with_max_imfs(4)).unwrap();
        let scale = signal_norm(&s, NormKind::Sup).max(1e-300);
        for (a, b) in d.reconstruct().iter().zip(s.values()) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
        for imf in &d.imfs {
            prop_assert!(imf.sift_iterations <= 200);
            let per_iter = SiftConfig::new(method).fits_per_iteration();
            prop_assert_eq!(imf.interpolant_fits, per_iter * imf.sift_iterations);
        }
    }
}

#[test]
fn extremum_kinds_alternate_on_plateaus() {
    let g = make_grid(0.0, 8.0, 1.0).unwrap();
    let s = SampledSignal::new(g, vec![0.0, 1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 0.0, 0.5]).unwrap();
    let e = find_extrema(&s).unwrap();
    assert_eq!(e.maxima.len(), 1);
    assert_eq!(e.maxima[0].t, 2.0);
    // even-length plateau: lower of the two center indices
    assert_eq!(e.minima[0].t, 5.0);
    assert_eq!(e.merged()[0].0, ExtremumKind::Maximum);
}
