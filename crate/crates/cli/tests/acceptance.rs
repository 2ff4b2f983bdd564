//! One PASS/FAIL line per acceptance criterion; exits 1 if any fails. Experiments run through the
//! same registry as `emd reproduce`, so tolerances live in one place.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use emd_cli::{run_experiment, ExperimentReport, Overrides};
use emd_core::{
    decompose, fit_spline, make_grid, signal_norm, synthesize, Knots, NormKind, SampledSignal,
    SiftConfig, SiftMethod, Tone, ToneRecipe,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn verdict(n: usize, title: &str, failures: &[String]) -> bool {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("{status} criterion {n}: {title}");
    for f in failures {
        println!("    {f}");
    }
    failures.is_empty()
}

fn failures_of(report: &ExperimentReport) -> Vec<String> {
    let mut out: Vec<String> = report
        .checks
        .iter()
        .filter(|c| c.asserted && !c.passed)
        .map(|c| format!("{}: {} {}", report.id, c.name, c.detail))
        .collect();
    if let Some(k) = &report.constants {
        if !k.all_pass() {
            out.push(format!(
                "{}: constants outside tolerance (table above)",
                report.id
            ));
        }
    }
    out
}

fn run(ids: &[&str]) -> Vec<String> {
    let dir = tempfile::tempdir().unwrap();
    ids.iter()
        .flat_map(|id| {
            let report = run_experiment(id, &Overrides::default(), dir.path()).unwrap();
            let failures = failures_of(&report);
            if !failures.is_empty() {
                print!("{}", report.summary());
            }
            failures
        })
        .collect()
}

fn criterion_1_rational_two_tone_amplitudes() -> bool {
    verdict(
        1,
        "rational two-tone amplitudes within 3%",
        &run(&["eq3.1-rational"]),
    )
}

fn criterion_2_perturbation_constants() -> bool {
    verdict(
        2,
        "perturbation constants, nu-slopes and their ratio",
        &run(&["sec2.1-perturbation"]),
    )
}

fn criterion_3_lemma_scaling() -> bool {
    verdict(
        3,
        "cubic scaling of projection differences and phase-shifted positivity",
        &run(&["lemma-scan", "phase-scan"]),
    )
}

fn criterion_4_linear_midpoint_order() -> bool {
    verdict(
        4,
        "second-order residual of one linear midpoint sift",
        &run(&["theorem3-order"]),
    )
}

fn criterion_5_lagrange_projections() -> bool {
    verdict(
        5,
        "cubic Lagrange projection constants and orderings",
        &run(&["sec3.1-lagrange"]),
    )
}

fn criterion_6_convergence_and_close_tones() -> bool {
    verdict(
        6,
        "iteration ordering over the threshold sweep and close-tone peaks",
        &run(&["sec4-case1", "sec4-case2"]),
    )
}

fn criterion_7_three_tone_peaks() -> bool {
    verdict(
        7,
        "midpoint IMF1 and IMF2 peaks within one bin",
        &run(&["eq2.1-three-tone"]),
    )
}

fn random_recipe(rng: &mut StdRng) -> ToneRecipe {
    let n = rng.random_range(2..=4);
    let tones = (0..n)
        .map(|_| {
            Tone::new(
                rng.random_range(0.2..1.5),
                rng.random_range(0.05..1.2),
                rng.random_range(-PI..PI),
            )
        })
        .collect();
    ToneRecipe::new(tones, None).unwrap()
}

fn reconstruction_failures() -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let grid = make_grid(0.0, 400.0, 0.5).unwrap();
    let methods = [
        SiftMethod::Classical,
        SiftMethod::Midpoint,
        SiftMethod::Hybrid,
    ];
    let mut out = Vec::new();
    for case in 0..100 {
        let s = synthesize(&random_recipe(&mut rng), &grid);
        let cfg = SiftConfig::new(methods[case % 3]).with_max_imfs(5);
        let d = decompose(&s, &cfg).unwrap();
        let scale = signal_norm(&s, NormKind::Sup);
        let err = d
            .reconstruct()
            .iter()
            .zip(s.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if err > 1e-9 * scale {
            out.push(format!("reconstruction case {case}: error {err:e}"));
        }
    }
    out
}

fn pure_tone_failures() -> Vec<String> {
    let mut out = Vec::new();
    for (w, method) in [
        (0.2, SiftMethod::Midpoint),
        (0.45, SiftMethod::Classical),
        (12.0 * PI / 256.0, SiftMethod::Midpoint),
    ] {
        let s = SampledSignal::from_fn(make_grid(-500.0, 500.0, 0.5).unwrap(), |t| (w * t).cos())
            .unwrap();
        let d = decompose(&s, &SiftConfig::new(method)).unwrap();
        if d.imfs.len() != 1 {
            out.push(format!("pure tone w={w} {method}: {} IMFs", d.imfs.len()));
            continue;
        }
        let imf = d.imfs[0].signal.values();
        let dot: f64 = imf.iter().zip(s.values()).map(|(a, b)| a * b).sum();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let corr = dot / (norm(imf) * norm(s.values()));
        if corr <= 0.999 {
            out.push(format!("pure tone w={w} {method}: correlation {corr}"));
        }
    }
    out
}

fn spline_failures() -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut out = Vec::new();
    for case in 0..50 {
        let n = rng.random_range(3..20);
        let mut t = 0.0;
        let (ts, vs): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|_| {
                t += rng.random_range(0.1..2.0);
                (t, rng.random_range(-5.0..5.0))
            })
            .unzip();
        let s = fit_spline(&Knots::from_slices(&ts, &vs).unwrap());
        for (x, v) in ts.iter().zip(&vs) {
            if (s.eval(*x).unwrap() - v).abs() > 1e-12 * (1.0 + v.abs()) {
                out.push(format!("spline case {case}: not exact at knot {x}"));
            }
        }
        for pair in s.coefficients().windows(2) {
            let ((lo, hi, c), (_, _, d)) = (pair[0], pair[1]);
            let h = hi - lo;
            let jumps = [
                c[0] + c[1] * h + c[2] * h * h + c[3] * h.powi(3) - d[0],
                c[1] + 2.0 * c[2] * h + 3.0 * c[3] * h * h - d[1],
                2.0 * c[2] + 6.0 * c[3] * h - 2.0 * d[2],
            ];
            let scale = 1.0 + d.iter().map(|x| x.abs()).sum::<f64>();
            if jumps.iter().any(|j| j.abs() > 1e-8 * scale) {
                out.push(format!("spline case {case}: not C2 at {hi}: {jumps:?}"));
            }
        }
    }
    out
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    files
}

fn determinism_failures() -> Vec<String> {
    let tmp = tempfile::tempdir().unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            let status = Command::new(env!("CARGO_BIN_EXE_emd"))
                .args([
                    "compare",
                    "--omega",
                    "0.147262,0.098175",
                    "--methods",
                    "classical,midpoint,hybrid",
                ])
                .args(["--t-start", "-1024", "--t-end", "1024"])
                .arg("--out-dir")
                .arg(&out)
                .status()
                .unwrap();
            assert!(status.success());
            let repro = Command::new(env!("CARGO_BIN_EXE_emd"))
                .args(["reproduce", "eq2.1-three-tone", "--out-dir"])
                .arg(&out)
                .output()
                .unwrap();
            assert!(repro.status.success());
            read_tree(&out)
        })
        .collect();
    let mut out = Vec::new();
    if outputs[0].is_empty() {
        out.push("no CLI output files".into());
    }
    if outputs[0] != outputs[1] {
        let differing: Vec<_> = outputs[0]
            .keys()
            .filter(|k| outputs[1].get(*k) != outputs[0].get(*k))
            .collect();
        out.push(format!("CLI outputs differ between runs: {differing:?}"));
    }
    out
}

fn criterion_8_property_suite() -> bool {
    let mut failures = reconstruction_failures();
    failures.extend(pure_tone_failures());
    failures.extend(run(&["thm1-high-pass"]));
    failures.extend(spline_failures());
    failures.extend(determinism_failures());
    verdict(
        8,
        "reconstruction, pure-tone fixed point, high-pass ordering, spline checks, determinism",
        &failures,
    )
}

fn main() {
    let criteria: [fn() -> bool; 8] = [
        criterion_1_rational_two_tone_amplitudes,
        criterion_2_perturbation_constants,
        criterion_3_lemma_scaling,
        criterion_4_linear_midpoint_order,
        criterion_5_lagrange_projections,
        criterion_6_convergence_and_close_tones,
        criterion_7_three_tone_peaks,
        criterion_8_property_suite,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
