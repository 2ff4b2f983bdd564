use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emd_cli::commands::{cmd_compare, cmd_decompose, cmd_spectrum, read_signal, RecipeSpec};
use emd_cli::report::write_file;
use emd_cli::{run_experiment, CliError, Overrides, EXPERIMENTS};
use emd_core::{ConvergenceNorm, EnvelopeInterp, SampledSignal, SiftConfig, SiftMethod, Window};

#[derive(Parser)]
#[command(
    name = "emd",
    version,
    about = "Classical and midpoint empirical mode decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a tone recipe to `t,value` CSV.
    Synth {
        #[command(flatten)]
        recipe: RecipeArgs,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decompose a signal into IMFs.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sift: SiftArgs,
        #[arg(long, default_value = "emd-out")]
        out_dir: PathBuf,
        /// Also write the signal and a gnuplot script.
        #[arg(long)]
        emit_gnuplot: bool,
    },
    /// Periodogram of a signal.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = WindowArg::Rectangular)]
        window: WindowArg,
        /// Number of strongest peaks to list.
        #[arg(long, default_value_t = 3)]
        peaks: usize,
        /// Write the spectrum CSV here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decompose with several methods and tabulate iterations and peaks.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sift: SiftArgs,
        /// Methods to compare.
        #[arg(long, value_delimiter = ',', default_value = "classical,midpoint")]
        methods: Vec<String>,
        /// Reference frequencies; peak distances are reported in bins.
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
        #[arg(long, default_value = "emd-out")]
        out_dir: PathBuf,
    },
    /// Continuous-time oracle checks (rational, perturbation, lagrange, lemmas, phase, theorem3).
    Oracle {
        name: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "emd-out")]
        out_dir: PathBuf,
    },
    /// Run a registry experiment; exits 1 if an asserted check fails.
    Reproduce {
        id: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "emd-out")]
        out_dir: PathBuf,
    },
    /// List registry experiments and their override keys.
    List,
}

#[derive(Args)]
struct RecipeArgs {
    /// Tone frequencies in rad per unit time.
    #[arg(long = "omega", value_delimiter = ',', allow_hyphen_values = true)]
    omegas: Vec<f64>,
    /// Tone amplitudes (default 1/N each).
    #[arg(long = "amp", value_delimiter = ',', allow_hyphen_values = true)]
    amps: Vec<f64>,
    #[arg(long = "phase", value_delimiter = ',', allow_hyphen_values = true)]
    phases: Vec<f64>,
    /// Perturbation amplitude; needs --noise-nu.
    #[arg(long, allow_hyphen_values = true, requires = "noise_nu")]
    noise_eps: Option<f64>,
    #[arg(long)]
    noise_nu: Option<f64>,
    #[arg(long, default_value_t = -2048.0, allow_hyphen_values = true)]
    t_start: f64,
    #[arg(long, default_value_t = 2048.0, allow_hyphen_values = true)]
    t_end: f64,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
}

impl RecipeArgs {
    fn spec(&self) -> RecipeSpec {
        RecipeSpec {
            omegas: self.omegas.clone(),
            amplitudes: (!self.amps.is_empty()).then(|| self.amps.clone()),
            phases: (!self.phases.is_empty()).then(|| self.phases.clone()),
            noise: self.noise_eps.zip(self.noise_nu),
            t_start: self.t_start,
            t_end: self.t_end,
            dt: self.dt,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// `t,value` CSV; otherwise the recipe flags are used.
    #[arg(long, conflicts_with = "omegas")]
    input: Option<PathBuf>,
    #[command(flatten)]
    recipe: RecipeArgs,
}

impl InputArgs {
    fn load(&self) -> Result<SampledSignal, CliError> {
        match &self.input {
            Some(p) => read_signal(p),
            None if self.recipe.omegas.is_empty() => Err(CliError::Usage(
                "give --input or at least one --omega".into(),
            )),
            None => self.recipe.spec().synthesize(),
        }
    }
}

#[derive(Args)]
struct SiftArgs {
    #[arg(long, default_value = "midpoint")]
    method: String,
    #[arg(long, default_value = "spline")]
    interp: String,
    /// Convergence threshold.
    #[arg(long, default_value_t = SiftConfig::default().conv_epsilon)]
    epsilon: f64,
    #[arg(long, default_value = "sd")]
    norm: String,
    #[arg(long, default_value_t = SiftConfig::default().max_sift_iters)]
    max_iters: usize,
    #[arg(long, default_value_t = SiftConfig::default().max_imfs)]
    max_imfs: usize,
    /// Stop once the residue norm falls below this fraction of the input's (0 disables).
    #[arg(long, default_value_t = SiftConfig::default().residue_tol)]
    residue_tol: f64,
    /// Extremum location: sample or parabolic.
    #[arg(long, default_value = "parabolic")]
    extrema: String,
}

impl SiftArgs {
    fn config(&self) -> Result<SiftConfig, CliError> {
        let cfg = SiftConfig::new(self.method.parse::<SiftMethod>()?)
            .with_interp(self.interp.parse::<EnvelopeInterp>()?)
            .with_threshold(self.norm.parse::<ConvergenceNorm>()?, self.epsilon)
            .with_max_iters(self.max_iters)
            .with_max_imfs(self.max_imfs)
            .with_extrema(self.extrema.parse()?)
            .with_residue_tol(self.residue_tol);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hann,
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn oracle_id(name: &str) -> Option<&'static str> {
    Some(match name {
        "rational" => "eq3.1-rational",
        "perturbation" => "sec2.1-perturbation",
        "lagrange" => "sec3.1-lagrange",
        "lemmas" => "lemma-scan",
        "phase" => "phase-scan",
        "theorem3" => "theorem3-order",
        _ => return None,
    })
}

fn reproduce(id: &str, set: &[String], out_dir: &std::path::Path) -> Result<ExitCode, CliError> {
    let ov = Overrides::parse(set)?;
    let report = run_experiment(id, &ov, out_dir)?;
    out(&report.summary());
    out(&format!("outputs in {}\n", out_dir.join(id).display()));
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Synth { recipe, output } => {
            let csv = recipe.spec().synthesize()?.to_csv();
            match output {
                Some(p) => {
                    let dir = p
                        .parent()
                        .filter(|d| !d.as_os_str().is_empty())
                        .unwrap_or(std::path::Path::new("."));
                    let name = p
                        .file_name()
                        .ok_or_else(|| CliError::Usage("bad output path".into()))?;
                    write_file(dir, &name.to_string_lossy(), &csv)?;
                }
                None => out(&csv),
            }
        }
        Command::Decompose {
            input,
            sift,
            out_dir,
            emit_gnuplot,
        } => {
            let cfg = sift.config()?;
            let signal = input.load()?;
            let (run, files) = cmd_decompose(&signal, &cfg, &out_dir, emit_gnuplot)?;
            out(&run.metadata(&[]));
            for f in files {
                out(&format!("wrote {}\n", f.display()));
            }
        }
        Command::Spectrum {
            input,
            window,
            peaks,
            output,
        } => {
            let window = match window {
                WindowArg::Rectangular => Window::Rectangular,
                WindowArg::Hann => Window::Hann,
            };
            let (spec, text) = cmd_spectrum(&input.load()?, window, peaks)?;
            out(&text);
            if let Some(p) = output {
                let dir = p
                    .parent()
                    .filter(|d| !d.as_os_str().is_empty())
                    .unwrap_or(std::path::Path::new("."));
                let name = p
                    .file_name()
                    .ok_or_else(|| CliError::Usage("bad output path".into()))?;
                write_file(dir, &name.to_string_lossy(), &spec.to_csv())?;
            }
        }
        Command::Compare {
            input,
            sift,
            methods,
            targets,
            out_dir,
        } => {
            let cfg = sift.config()?;
            let methods = methods
                .iter()
                .map(|m| m.parse::<SiftMethod>())
                .collect::<Result<Vec<_>, _>>()?;
            let (_, table) = cmd_compare(&input.load()?, &cfg, &methods, &targets, &out_dir)?;
            out(&table);
        }
        Command::Oracle { name, set, out_dir } => {
            let id = oracle_id(&name).ok_or_else(|| CliError::UnknownExperiment(name.clone()))?;
            return reproduce(id, &set, &out_dir);
        }
        Command::Reproduce { id, set, out_dir } => return reproduce(&id, &set, &out_dir),
        Command::List => {
            for e in EXPERIMENTS {
                out(&format!(
                    "{:<22} {}\n{:<22} overrides: {}\n",
                    e.id, e.summary, "", e.keys
                ));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
