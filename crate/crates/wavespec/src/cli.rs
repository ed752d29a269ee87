//! Command-line front end. Every command reads one scenario configuration,
//! writes its outputs atomically and records a manifest next to them.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wavespec_core::sea::{rel_hs_error, significant_wave_height};
use wavespec_core::{forward, solve, DopplerSpectrum, SpectrumGrid, Termination};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::Error;
use crate::experiments::{run_noise_table, run_perturbation_sweep, run_stability, suggest_lambda, Experiment, StabilityRule};
use crate::io::{self, Manifest};
use crate::perturb::{add_doppler_noise, perturb_spectrum, PerturbationKind, PerturbationSpec};
use crate::validate;

#[derive(Debug, Parser)]
#[command(name = "wavespec", version, about = "Directional wave spectrum reconstruction from HF radar Doppler spectra")]
pub struct Cli {
    /// Scenario configuration (JSON). Built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set solver.lambda=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the model spectrum and its clean Doppler spectrum.
    Simulate {
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Perturb a spectrum grid or add noise to a Doppler spectrum.
    Perturb(PerturbArgs),
    /// Reconstruct a spectrum from a Doppler spectrum.
    Reconstruct(ReconstructArgs),
    /// Perturbation-level sweep against clean data.
    Sweep {
        #[arg(long)]
        out: PathBuf,
        /// Levels in percent (defaults to the configured list).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Truth-initialized solves under Doppler noise.
    NoiseTable {
        #[arg(long)]
        out: PathBuf,
    },
    /// Noise-level sweep with noise-dependent regularization.
    Stability {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the λ heuristic for a Doppler spectrum and initial guess.
    SuggestLambda {
        #[arg(long)]
        doppler: PathBuf,
        /// `model` or a spectrum grid JSON file.
        #[arg(long, default_value = "model")]
        init: String,
    },
    /// Run the verification suite.
    Validate {
        /// Skip the solver convergence run and the brute-force oracle comparison.
        #[arg(long)]
        quick: bool,
        /// Fault injection: corrupt the analytic gradient.
        #[arg(long, hide = true)]
        corrupt_gradient: bool,
    },
    /// Print the effective configuration.
    PrintConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    SpectrumInit,
    DopplerNoise,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Spectrum grid JSON or Doppler CSV, matching `--kind`.
    #[arg(long)]
    pub input: PathBuf,
    /// Target relative error in percent.
    #[arg(long)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub doppler: PathBuf,
    /// `model`, `perturbed` (model perturbed by the configured level) or a
    /// spectrum grid JSON file.
    #[arg(long, default_value = "perturbed")]
    pub init: String,
    /// Reference spectrum for error reporting.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input, configuration or I/O: exit code 1.
    Invalid(anyhow::Error),
    /// The computation ran but did not produce a usable result: exit code 2.
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Invalid(e) | Failure::Numerical(e) => e,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn invalid(msg: String) -> Failure {
    Failure::Invalid(anyhow::anyhow!(msg))
}

pub fn load_config(cli: &Cli) -> CliResult<ScenarioConfig> {
    let base = match &cli.config {
        Some(path) => io::read_json::<ScenarioConfig>(path)?,
        None => ScenarioConfig::default(),
    };
    Ok(base.with_overrides(&cli.overrides)?)
}

/// Runs one parsed command line and returns what it printed on stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(invalid("--threads must be at least 1".into()));
        }
        // Only the first call can size the global pool; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = load_config(cli)?;
    if let Command::PrintConfig = cli.command {
        return Ok(config.to_json_pretty() + "\n");
    }
    let scenario = config.build()?;
    let hash = config.hash();
    match &cli.command {
        Command::Simulate { out_dir } => simulate(&scenario, &hash, out_dir),
        Command::Perturb(args) => perturb(&scenario, &hash, args),
        Command::Reconstruct(args) => reconstruct(&scenario, &hash, args),
        Command::Sweep { out, levels, seeds } => {
            let e = &scenario.config.experiments;
            let levels = levels.clone().unwrap_or_else(|| e.sweep_levels_pct.clone());
            let seeds = seeds.clone().unwrap_or_else(|| e.seeds.clone());
            if levels.iter().any(|l| !(*l >= 0.0)) {
                return Err(invalid("levels must be nonnegative".into()));
            }
            with_experiment(&scenario, |exp| {
                let rows = run_perturbation_sweep(exp, &levels, &seeds);
                write_table(out, &rows, &hash, "sweep", rows.iter().all(|r| r.status != "failed"))
            })
        }
        Command::NoiseTable { out } => {
            let e = &scenario.config.experiments;
            with_experiment(&scenario, |exp| {
                let rows = run_noise_table(exp, &e.noise_levels_pct, e.noise_iterations, e.seed);
                write_table(out, &rows, &hash, "noise-table", rows.iter().all(|r| r.status != "failed"))
            })
        }
        Command::Stability { out } => {
            let e = &scenario.config.experiments;
            let rule = StabilityRule {
                lambda_coef: e.stability_lambda_coef,
                alpha_coef: e.stability_alpha_coef,
                iterations: e.stability_iterations,
            };
            with_experiment(&scenario, |exp| {
                let rows = run_stability(exp, &e.stability_deltas, &e.seeds, rule);
                write_table(out, &rows, &hash, "stability", rows.iter().all(|r| r.status != "failed"))
            })
        }
        Command::SuggestLambda { doppler, init } => {
            let sigma2 = io::read_doppler(doppler, &scenario.params)?;
            let s_init = match init.as_str() {
                "model" => scenario.truth()?,
                path => io::read_grid(Path::new(path))?,
            };
            let table = scenario_table_for(&scenario, &s_init, &sigma2)?;
            let lambda = suggest_lambda(&sigma2, &s_init, &table)?;
            Ok(format!("{lambda:e}\n"))
        }
        Command::Validate { quick, corrupt_gradient } => {
            let mut checks = validate::run_suite(&scenario, *quick)?;
            if *corrupt_gradient {
                let seed = scenario.config.experiments.seed;
                checks[0] = validate::gradient_check(&scenario.params, 50, seed, true)?;
            }
            let report: String = checks.iter().map(|c| format!("{c}\n")).collect();
            if checks.iter().all(|c| c.passed) {
                Ok(report)
            } else {
                print!("{report}");
                Err(invalid("verification suite failed".into()))
            }
        }
        Command::PrintConfig => unreachable!("handled above"),
    }
}

fn scenario_table_for(
    scenario: &Scenario,
    s: &SpectrumGrid,
    sigma2: &DopplerSpectrum,
) -> CliResult<wavespec_core::QuadratureTable> {
    if *s.geometry() != scenario.geometry {
        return Err(invalid("spectrum grid does not match the configured grid".into()));
    }
    Ok(scenario.table_on(sigma2.domain())?)
}

fn with_experiment(scenario: &Scenario, body: impl FnOnce(&Experiment) -> CliResult<String>) -> CliResult<String> {
    let table = scenario.table()?;
    let truth = scenario.truth()?;
    let clean = forward(&truth, &table).map_err(Error::from)?;
    body(&Experiment::new(&table, &truth, &clean, scenario.solver))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_table<T: Serialize>(out: &Path, rows: &[T], hash: &str, command: &str, all_ok: bool) -> CliResult<String> {
    io::write_rows(out, rows)?;
    io::write_json(&manifest_path(out), &Manifest::new(command, hash.to_string(), &[out]))?;
    if all_ok {
        Ok(format!("wrote {} rows to {}\n", rows.len(), out.display()))
    } else {
        Err(Failure::Numerical(anyhow::anyhow!("some cells failed; see {}", out.display())))
    }
}

fn simulate(scenario: &Scenario, hash: &str, out_dir: &Path) -> CliResult<String> {
    let truth = scenario.truth()?;
    let table = scenario.table()?;
    let sigma2 = forward(&truth, &table).map_err(Error::from)?;
    if sigma2.values().iter().any(|v| !v.is_finite()) {
        return Err(Failure::Numerical(anyhow::anyhow!("forward model produced non-finite values")));
    }
    let truth_path = out_dir.join("truth.json");
    let doppler_path = out_dir.join("doppler.csv");
    io::write_grid(&truth_path, &truth)?;
    io::write_doppler(&doppler_path, &sigma2)?;
    let mut manifest = Manifest::new("simulate", hash.to_string(), &[&truth_path, &doppler_path]);
    manifest.metrics.insert("hs_m".into(), significant_wave_height(&truth).map_err(Error::from)?);
    io::write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(format!("wrote {} and {}\n", truth_path.display(), doppler_path.display()))
}

fn perturb(scenario: &Scenario, hash: &str, args: &PerturbArgs) -> CliResult<String> {
    let achieved = match args.kind {
        Kind::SpectrumInit => {
            let s = io::read_grid(&args.input)?;
            let spec = PerturbationSpec {
                kind: PerturbationKind::SpectrumInit,
                target_rel_error_pct: args.level,
                rng_seed: args.seed,
            };
            let (out, achieved) = perturb_spectrum(&s, &spec)?;
            io::write_grid(&args.out, &out)?;
            achieved
        }
        Kind::DopplerNoise => {
            let sigma2 = io::read_doppler(&args.input, &scenario.params)?;
            let spec = PerturbationSpec {
                kind: PerturbationKind::DopplerNoise,
                target_rel_error_pct: args.level,
                rng_seed: args.seed,
            };
            let (out, achieved) = add_doppler_noise(&sigma2, &spec)?;
            io::write_doppler(&args.out, &out)?;
            achieved
        }
    };
    let mut manifest = Manifest::new("perturb", hash.to_string(), &[&args.out]);
    manifest.metrics.insert("pre_clamp_pct".into(), achieved.pre_clamp_pct);
    manifest.metrics.insert("post_clamp_pct".into(), achieved.post_clamp_pct);
    io::write_json(&manifest_path(&args.out), &manifest)?;
    Ok(format!(
        "wrote {} (pre-clamp {:.6}%, post-clamp {:.6}%)\n",
        args.out.display(),
        achieved.pre_clamp_pct,
        achieved.post_clamp_pct
    ))
}

#[derive(Debug, Serialize)]
struct Summary {
    termination: &'static str,
    iterations: usize,
    theta_total: f64,
    theta_misfit: f64,
    theta_tikhonov: f64,
    theta_sparsity: f64,
    hs_m: f64,
    err_init_pct: Option<f64>,
    err_final_pct: Option<f64>,
    hs_err_init_pct: Option<f64>,
    hs_err_final_pct: Option<f64>,
}

fn reconstruct(scenario: &Scenario, hash: &str, args: &ReconstructArgs) -> CliResult<String> {
    let sigma2 = io::read_doppler(&args.doppler, &scenario.params)?;
    let truth = args.truth.as_deref().map(io::read_grid).transpose()?;
    let s0 = match args.init.as_str() {
        "model" => scenario.truth()?,
        "perturbed" => {
            let e = &scenario.config.experiments;
            let spec = PerturbationSpec {
                kind: PerturbationKind::SpectrumInit,
                target_rel_error_pct: e.perturbation_pct,
                rng_seed: e.seed,
            };
            perturb_spectrum(&scenario.truth()?, &spec)?.0
        }
        path => io::read_grid(Path::new(path))?,
    };
    if !s0.is_nonnegative() {
        return Err(invalid(format!("initial spectrum `{}` has negative entries", args.init)));
    }
    if let Some(t) = &truth {
        if t.geometry() != s0.geometry() {
            return Err(invalid("truth and initial grids differ".into()));
        }
    }
    let table = scenario_table_for(scenario, &s0, &sigma2)?;
    let trace = solve(&s0, &sigma2, &table, &scenario.solver, truth.as_ref()).map_err(Error::from)?;
    let last = trace.last();
    let hs_err = |s: &SpectrumGrid| -> CliResult<Option<f64>> {
        match &truth {
            Some(t) => {
                let h = significant_wave_height(s).map_err(Error::from)?;
                let h_true = significant_wave_height(t).map_err(Error::from)?;
                Ok(Some(rel_hs_error(h, h_true).map_err(Error::from)?))
            }
            None => Ok(None),
        }
    };
    let summary = Summary {
        termination: trace.termination.as_str(),
        iterations: trace.iterations(),
        theta_total: last.theta.total,
        theta_misfit: last.theta.data_misfit,
        theta_tikhonov: last.theta.tikhonov,
        theta_sparsity: last.theta.sparsity,
        hs_m: last.hs,
        err_init_pct: trace.records[0].rel_err_pct,
        err_final_pct: last.rel_err_pct,
        hs_err_init_pct: hs_err(&s0)?,
        hs_err_final_pct: hs_err(&trace.spectrum)?,
    };
    let spectrum_path = args.out_dir.join("spectrum.json");
    let trace_path = args.out_dir.join("trace.csv");
    let summary_path = args.out_dir.join("summary.json");
    io::write_grid(&spectrum_path, &trace.spectrum)?;
    io::write_trace(&trace_path, &trace.records)?;
    io::write_json(&summary_path, &summary)?;
    let manifest = Manifest::new("reconstruct", hash.to_string(), &[&spectrum_path, &trace_path, &summary_path]);
    io::write_json(&args.out_dir.join("manifest.json"), &manifest)?;
    let line = format!(
        "{} after {} iterations, theta {:.6e}, H_s {:.4} m\n",
        summary.termination, summary.iterations, summary.theta_total, summary.hs_m
    );
    if trace.termination == Termination::Stalled || !last.theta.total.is_finite() {
        print!("{line}");
        return Err(Failure::Numerical(anyhow::anyhow!("solver {}", summary.termination)));
    }
    Ok(line)
}
