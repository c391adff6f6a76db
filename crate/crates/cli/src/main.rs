//! `gic`: penalty design, order selection, Monte Carlo sweeps and u-statistic
//! tables from the command line.

mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gic_core::sim::Preset;
use gic_core::PenaltyRule;

#[derive(Parser)]
#[command(
    name = "gic",
    version,
    about = "Generalized information criterion toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Compute the penalty ν meeting an overestimation target.
    Design {
        #[command(subcommand)]
        target: DesignTarget,
    },
    /// Select the model order of a data file.
    Select {
        #[command(subcommand)]
        target: SelectTarget,
    },
    /// Run a Monte Carlo SNR sweep and write the outcome CSV.
    Simulate(SimulateArgs),
    /// Tabulate the shifted-gamma CDF of u, optionally against draws.
    Ustat(UstatArgs),
    /// Evaluate the fitted u-distribution at given points.
    Dist(DistArgs),
}

#[derive(Subcommand)]
enum DesignTarget {
    /// Source enumeration from array snapshots.
    SourceEnum(DesignEnumArgs),
    /// Sinusoids in white noise (general linear model).
    Glm(DesignGlmArgs),
}

#[derive(Args)]
struct BackendArgs {
    /// Source of the u-moments.
    #[arg(long, value_enum, default_value_t = BackendKind::Mc)]
    backend: BackendKind,
    /// Monte Carlo draws for the mc backend.
    #[arg(long, default_value_t = gic_core::wishart::UBackend::DEFAULT_TRIALS)]
    mc_trials: u64,
}

#[derive(Args)]
struct DesignEnumArgs {
    /// Number of sensors.
    #[arg(long)]
    p: usize,
    /// Number of snapshots.
    #[arg(long)]
    n: usize,
    /// Largest true order the design must cover.
    #[arg(long)]
    qmax: usize,
    /// Target high-SNR overestimation probability.
    #[arg(long)]
    pover_max: f64,
    #[command(flatten)]
    backend: BackendArgs,
    /// Seed of the mc backend.
    #[arg(long, default_value_t = gic_core::wishart::UBackend::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct DesignGlmArgs {
    /// Number of samples.
    #[arg(long)]
    n: usize,
    /// Target overestimation probability under noise only.
    #[arg(long)]
    pover_max: f64,
    /// Terms in the union bound.
    #[arg(long, default_value_t = 2)]
    imax: usize,
}

#[derive(Subcommand)]
enum SelectTarget {
    /// CSV with columns re_0,im_0,…,re_{p-1},im_{p-1}, one row per snapshot.
    SourceEnum(SelectArgs),
    /// CSV with columns re,im, one row per sample.
    Sinusoids(SelectArgs),
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    input: PathBuf,
    /// aic, bic (or mdl), or gic:NU.
    #[arg(long, value_parser = parse_penalty)]
    penalty: PenaltyRule,
    /// Largest candidate order.
    #[arg(long)]
    qmax: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Mc,
    AppendixA,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    SourceEnum,
    Sinusoids,
}

#[derive(Args)]
struct SimulateArgs {
    /// Start from a named scenario: fig2, fig6, fig7 or fig10.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Scenario family when no preset is given.
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    /// Number of sensors (source enumeration).
    #[arg(long)]
    p: Option<usize>,
    /// True order.
    #[arg(long)]
    q: Option<usize>,
    /// Samples or snapshots per trial.
    #[arg(long)]
    n: Option<usize>,
    /// Largest candidate order of the estimator.
    #[arg(long)]
    qmax: Option<usize>,
    #[arg(long, value_parser = parse_penalty)]
    penalty: Option<PenaltyRule>,
    /// Explicit SNR grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["snr_from", "snr_to"])]
    snr_db: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true, requires = "snr_to")]
    snr_from: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "snr_from")]
    snr_to: Option<f64>,
    #[arg(long, default_value_t = 2.5)]
    snr_step: f64,
    /// Trials per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sinusoid phases in radians, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    /// Union-bound depth of the sinusoid overlay.
    #[arg(long)]
    imax: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    #[arg(long)]
    mc_trials: Option<u64>,
    /// Seed of the mc u-model backend.
    #[arg(long)]
    mc_seed: Option<u64>,
    /// Append analytic overestimation columns.
    #[arg(long)]
    overlay: bool,
    /// CSV destination (stdout if absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Manifest destination; defaults to OUTPUT.manifest.json, or stderr.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct UstatArgs {
    /// Wishart dimension p′.
    #[arg(long)]
    p_prime: usize,
    /// Degrees of freedom.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    backend: BackendArgs,
    /// Seed of the mc backend and of the empirical draws.
    #[arg(long, default_value_t = gic_core::wishart::UBackend::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 101)]
    grid_points: usize,
    /// Draws for an empirical CDF column (0 omits it).
    #[arg(long, default_value_t = 0)]
    empirical_trials: u64,
    /// Manifest destination (stderr if absent).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    p_prime: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    backend: BackendArgs,
    #[arg(long, default_value_t = gic_core::wishart::UBackend::DEFAULT_SEED)]
    seed: u64,
    /// Points at which to evaluate the CDF, comma separated.
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    /// Probabilities at which to evaluate the quantile, comma separated.
    #[arg(long, value_delimiter = ',')]
    prob: Vec<f64>,
}

fn parse_penalty(s: &str) -> Result<PenaltyRule, String> {
    s.parse().map_err(|e: gic_core::Error| e.to_string())
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    Preset::parse(s)
        .ok_or_else(|| format!("unknown preset `{s}` (expected fig2, fig6, fig7 or fig10)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Design {
            target: DesignTarget::SourceEnum(a),
        } => run::design_enum(&a),
        Command::Design {
            target: DesignTarget::Glm(a),
        } => run::design_glm(&a),
        Command::Select {
            target: SelectTarget::SourceEnum(a),
        } => run::select_enum(&a),
        Command::Select {
            target: SelectTarget::Sinusoids(a),
        } => run::select_sinusoids(&a),
        Command::Simulate(a) => run::simulate(&a),
        Command::Ustat(a) => run::ustat(&a),
        Command::Dist(a) => run::dist(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gic: {e}");
            ExitCode::from(e.code())
        }
    }
}
