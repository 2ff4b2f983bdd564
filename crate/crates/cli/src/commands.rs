//! Signal-level commands shared by the binary and the experiment registry.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use emd_core::spectral::{power_spectrum_windowed, refined_peak_distance};
use emd_core::{
    decompose, make_grid, power_spectrum, spectral_peak_distance, synthesize, Decomposition,
    SampledSignal, SiftConfig, SiftMethod, SpectrumReport, Tone, ToneRecipe, Window,
};
use rayon::prelude::*;

use crate::report::{gnuplot_script, write_file, Curve, Panel};
use crate::{CliError, WithContext};

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub fn color(k: usize) -> &'static str {
    COLORS[k % COLORS.len()]
}

/// Tone-recipe description as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RecipeSpec {
    pub omegas: Vec<f64>,
    /// Defaults to `1/N` for each tone.
    pub amplitudes: Option<Vec<f64>>,
    pub phases: Option<Vec<f64>>,
    pub noise: Option<(f64, f64)>,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl RecipeSpec {
    pub fn recipe(&self) -> Result<ToneRecipe, CliError> {
        let n = self.omegas.len();
        if n == 0 {
            return Err(CliError::Usage("at least one --omega is required".into()));
        }
        let amps = self
            .amplitudes
            .clone()
            .unwrap_or_else(|| vec![1.0 / n as f64; n]);
        let phases = self.phases.clone().unwrap_or_else(|| vec![0.0; n]);
        if amps.len() != n || phases.len() != n {
            return Err(CliError::Usage(format!(
                "{n} frequencies but {} amplitudes and {} phases",
                amps.len(),
                phases.len()
            )));
        }
        let tones = (0..n)
            .map(|k| Tone::new(amps[k], self.omegas[k], phases[k]))
            .collect();
        let recipe = ToneRecipe::new(tones, None)?;
        Ok(match self.noise {
            Some((eps, nu)) => recipe.with_noise(eps, nu)?,
            None => recipe,
        })
    }

    pub fn synthesize(&self) -> Result<SampledSignal, CliError> {
        let grid = make_grid(self.t_start, self.t_end, self.dt)?;
        Ok(synthesize(&self.recipe()?, &grid))
    }
}

pub fn read_signal(path: &Path) -> Result<SampledSignal, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    SampledSignal::from_csv(&text).context(|| path.display().to_string())
}

/// A decomposition with the spectrum of each IMF.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub decomposition: Decomposition,
    pub spectra: Vec<SpectrumReport>,
}

impl RunOutput {
    pub fn iterations(&self, imf: usize) -> Option<usize> {
        self.decomposition.imfs.get(imf).map(|m| m.sift_iterations)
    }

    /// Peak distance of IMF `imf` from `omega`, in DFT bins.
    pub fn peak_bins(&self, imf: usize, omega: f64) -> Option<f64> {
        self.spectra
            .get(imf)
            .map(|s| spectral_peak_distance(s, omega))
    }

    pub fn peak_freq(&self, imf: usize) -> Option<f64> {
        self.spectra.get(imf).map(|s| s.peak_freq)
    }

    pub fn total_fits(&self) -> usize {
        self.decomposition
            .imfs
            .iter()
            .map(|m| m.interpolant_fits)
            .sum()
    }

    /// Decomposition metadata followed by per-IMF peak frequencies and
    /// distances from `targets` (in bins).
    pub fn metadata(&self, targets: &[f64]) -> String {
        let mut out = format!("label={}\n", self.label);
        out.push_str(&self.decomposition.metadata());
        let _ = writeln!(out, "interpolant_fits_total={}", self.total_fits());
        if let Some(s) = self.spectra.first() {
            let _ = writeln!(out, "bin_width={}", s.bin_width);
        }
        for (k, s) in self.spectra.iter().enumerate() {
            let _ = writeln!(out, "imf{}_peak_freq={}", k + 1, s.peak_freq);
            let _ = writeln!(
                out,
                "imf{}_refined_peak_freq={}",
                k + 1,
                s.refined_peak_freq
            );
            for (j, &w) in targets.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "imf{}_bins_from_tone{}={}",
                    k + 1,
                    j + 1,
                    spectral_peak_distance(s, w)
                );
                let _ = writeln!(
                    out,
                    "imf{}_refined_bins_from_tone{}={:.4}",
                    k + 1,
                    j + 1,
                    refined_peak_distance(s, w)
                );
            }
        }
        out
    }

    /// `decomposition.csv`, `metadata.txt` and `spectrum_imf{k}.csv` in `dir`.
    pub fn write(&self, dir: &Path, targets: &[f64]) -> Result<Vec<PathBuf>, CliError> {
        let mut files = vec![
            write_file(dir, "decomposition.csv", &self.decomposition.to_csv())?,
            write_file(dir, "metadata.txt", &self.metadata(targets))?,
        ];
        for (k, s) in self.spectra.iter().enumerate() {
            files.push(write_file(
                dir,
                &format!("spectrum_imf{}.csv", k + 1),
                &s.to_csv(),
            )?);
        }
        Ok(files)
    }
}

pub fn analyse(
    signal: &SampledSignal,
    cfg: &SiftConfig,
    label: &str,
) -> Result<RunOutput, CliError> {
    let decomposition = decompose(signal, cfg).context(|| format!("decomposing ({label})"))?;
    let spectra = decomposition
        .imfs
        .iter()
        .map(|m| power_spectrum(&m.signal))
        .collect::<Result<Vec<_>, _>>()
        .context(|| format!("spectrum ({label})"))?;
    Ok(RunOutput {
        label: label.to_string(),
        decomposition,
        spectra,
    })
}

/// Runs every labelled config in parallel; results keep the input order.
pub fn analyse_all(
    signal: &SampledSignal,
    runs: &[(String, SiftConfig)],
) -> Result<Vec<RunOutput>, CliError> {
    runs.par_iter()
        .map(|(label, cfg)| analyse(signal, cfg, label))
        .collect()
}

/// Panels for one run: each IMF over time, then each IMF spectrum.
/// `prefix` is the run directory relative to the script.
/// `tones` names a `t,tone1,..` file and its tone count.
pub fn run_panels(run: &RunOutput, prefix: &str, tones: Option<(&str, usize)>) -> Vec<Panel> {
    let mut panels = Vec::new();
    let join = |name: &str| {
        if prefix.is_empty() {
            name.to_string()
        } else {
            format!("{prefix}/{name}")
        }
    };
    let tag = if prefix.is_empty() {
        String::new()
    } else {
        format!("{}_", prefix.replace('/', "_"))
    };
    for k in 0..run.spectra.len() {
        let mut curves = vec![Curve {
            file: join("decomposition.csv"),
            x_col: 1,
            y_col: k + 2,
            title: format!("IMF{} ({})", k + 1, run.label),
            color: color(0),
        }];
        if let Some((t, _)) = tones.filter(|&(_, n)| k < n) {
            curves.push(Curve {
                file: t.to_string(),
                x_col: 1,
                y_col: k + 2,
                title: format!("tone {}", k + 1),
                color: color(1),
            });
        }
        panels.push(Panel {
            output: format!("{tag}imf{}.png", k + 1),
            title: format!("IMF {} ({})", k + 1, run.label),
            xlabel: "t".into(),
            ylabel: "amplitude".into(),
            curves,
            xrange: None,
        });
        panels.push(Panel {
            output: format!("{tag}spectrum_imf{}.png", k + 1),
            title: format!("power spectrum of IMF {} ({})", k + 1, run.label),
            xlabel: "frequency (rad per unit time)".into(),
            ylabel: "power".into(),
            curves: vec![Curve {
                file: join(&format!("spectrum_imf{}.csv", k + 1)),
                x_col: 1,
                y_col: 2,
                title: format!("IMF{}", k + 1),
                color: color(2),
            }],
            xrange: None,
        });
    }
    panels
}

/// Decomposes one signal and writes its outputs into `dir`.
pub fn cmd_decompose(
    signal: &SampledSignal,
    cfg: &SiftConfig,
    dir: &Path,
    emit_gnuplot: bool,
) -> Result<(RunOutput, Vec<PathBuf>), CliError> {
    cfg.validate()?;
    let run = analyse(signal, cfg, &cfg.method.to_string())?;
    let mut files = run.write(dir, &[])?;
    if emit_gnuplot {
        let mut panels = vec![signal_panel("signal.csv")];
        panels.extend(run_panels(&run, "", None));
        files.push(write_file(dir, "signal.csv", &signal.to_csv())?);
        files.push(write_file(dir, "plot.gp", &gnuplot_script(&panels))?);
    }
    Ok((run, files))
}

pub fn signal_panel(file: &str) -> Panel {
    Panel {
        output: "signal.png".into(),
        title: "signal".into(),
        xlabel: "t".into(),
        ylabel: "amplitude".into(),
        curves: vec![Curve {
            file: file.into(),
            x_col: 1,
            y_col: 2,
            title: "signal".into(),
            color: color(0),
        }],
        xrange: None,
    }
}

pub fn cmd_spectrum(
    signal: &SampledSignal,
    window: Window,
    top: usize,
) -> Result<(SpectrumReport, String), CliError> {
    let spec = power_spectrum_windowed(signal, window)?;
    let mut text = format!(
        "n={}\ndt={}\nbin_width={}\npeak_freq={}\nrefined_peak_freq={}\npeak_power={}\n",
        spec.n, spec.dt, spec.bin_width, spec.peak_freq, spec.refined_peak_freq, spec.peak_power
    );
    for (k, f) in spec.dominant_peaks(top).iter().enumerate() {
        let _ = writeln!(text, "peak{}={}", k + 1, f);
    }
    Ok((spec, text))
}

/// Runs the same config under each method and tabulates cost and peaks.
pub fn cmd_compare(
    signal: &SampledSignal,
    base: &SiftConfig,
    methods: &[SiftMethod],
    targets: &[f64],
    dir: &Path,
) -> Result<(Vec<RunOutput>, String), CliError> {
    let runs: Vec<(String, SiftConfig)> = methods
        .iter()
        .map(|&m| {
            let mut c = *base;
            c.method = m;
            (m.to_string(), c)
        })
        .collect();
    for (_, c) in &runs {
        c.validate()?;
    }
    let outputs = analyse_all(signal, &runs)?;
    let mut table = String::from("method,imf,iterations,converged,interpolant_fits,peak_freq");
    for j in 0..targets.len() {
        let _ = write!(table, ",bins_from_target{}", j + 1);
    }
    table.push('\n');
    for run in &outputs {
        run.write(&dir.join(&run.label), targets)?;
        for (k, imf) in run.decomposition.imfs.iter().enumerate() {
            let _ = write!(
                table,
                "{},{},{},{},{},{}",
                run.label,
                k + 1,
                imf.sift_iterations,
                imf.converged,
                imf.interpolant_fits,
                run.spectra[k].peak_freq
            );
            for &w in targets {
                let _ = write!(table, ",{}", spectral_peak_distance(&run.spectra[k], w));
            }
            table.push('\n');
        }
    }
    write_file(dir, "comparison.csv", &table)?;
    Ok((outputs, table))
}
