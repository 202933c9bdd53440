//! `wavepanel` command-line interface.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wavepanel", version, about = "Mask-usage and excess-mortality panel analyses")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Master seed for every random draw; echoed into each output header.
    #[arg(long, global = true, default_value_t = wavepanel::stats::DEFAULT_SEED)]
    pub seed: u64,
    /// Directory holding daily.csv, weekly.csv and covariates.csv.
    #[arg(long, global = true, default_value = "data")]
    pub data: PathBuf,
    /// Daily file, overriding <DATA>/daily.csv.
    #[arg(long, global = true)]
    pub daily: Option<PathBuf>,
    /// Weekly file, overriding <DATA>/weekly.csv.
    #[arg(long, global = true)]
    pub weekly: Option<PathBuf>,
    /// Covariates file, overriding <DATA>/covariates.csv.
    #[arg(long, global = true)]
    pub covariates: Option<PathBuf>,
    /// Required number of countries; 0 accepts any number.
    #[arg(long, global = true, default_value_t = 24)]
    pub expect_countries: usize,
    /// Treat zero mask values before a country's first positive value as missing.
    #[arg(long, global = true)]
    pub drop_leading_zeros: bool,
    /// Width of the centered rolling mean applied before trough detection, in days.
    #[arg(long, global = true, default_value_t = 7)]
    pub smoothing: usize,
    /// Number of phases (troughs found = phases - 1).
    #[arg(long, global = true, default_value_t = 3)]
    pub phases: usize,
    /// Share of a phase's deaths a wave must contain.
    #[arg(long, global = true, default_value_t = 0.99)]
    pub mass: f64,
    /// Comma-separated phase start dates replacing trough detection, e.g. 2020-08-03,2021-07-12.
    #[arg(long, global = true, value_delimiter = ',')]
    pub boundaries: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutcomeArg {
    Weekly,
    Cumulative,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Pearson,
    Spearman,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate the input files, then print a summary.
    Validate,
    /// Detect phases and waves; writes phases.csv and waves.csv.
    Waves,
    /// Compute the five mask indices; writes indices.csv and wave_records.csv.
    Indices,
    /// Correlation of two columns, or the index table and ratio analyses.
    Corr(CorrArgs),
    /// Cross-country regressions with standardized coefficients.
    Regress(RegressArgs),
    /// Two-way fixed-effects lag sweep; writes twfe_table.csv.
    Twfe(TwfeArgs),
    /// Monte-Carlo TWFE experiment on synthetic panels; writes falsify_report.csv.
    Falsify(FalsifyArgs),
    /// Render figures as SVG.
    Plot(PlotArgs),
    /// Run every analysis and figure into the output directory.
    ReproduceAll {
        /// Bootstrap resamples.
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
    },
    /// Write a synthetic dataset (not real data) in the input schema to <OUT>.
    DemoData {
        /// Number of synthetic countries.
        #[arg(long, default_value_t = 24)]
        countries: usize,
    },
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// Correlation method.
    #[arg(long, value_enum, default_value_t = MethodArg::Pearson)]
    pub method: MethodArg,
    /// First column; with --y prints one correlation instead of the tables.
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    /// Second column.
    #[arg(long, requires = "x")]
    pub y: Option<String>,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Outcome covariate.
    #[arg(long, default_value = "age_adjusted_excess")]
    pub outcome: String,
    /// Mask index used as the mask regressor; all five when omitted.
    #[arg(long)]
    pub mask_index: Option<String>,
    /// Use t(n-k-1) instead of normal quantiles for standardized intervals.
    #[arg(long)]
    pub t_quantile: bool,
}

#[derive(Debug, Args)]
pub struct TwfeArgs {
    /// Outcome series.
    #[arg(long, value_enum, default_value_t = OutcomeArg::Both)]
    pub outcome: OutcomeArg,
    /// Lags as `a:b` or a comma list.
    #[arg(long, default_value = "-1:4", allow_hyphen_values = true)]
    pub lags: String,
    /// Write per-country residual series and residual grids into this directory.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    /// Monte-Carlo replications.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Sd of per-country wave shifts, in weeks.
    #[arg(long, default_value_t = 3.0)]
    pub shift_sd: f64,
    /// Sd of log per-country wave size.
    #[arg(long, default_value_t = 0.3)]
    pub scale_sd: f64,
    /// Mask points per unit of the country's epidemic curve.
    #[arg(long, default_value_t = 0.5)]
    pub reactivity: f64,
    /// Sd of idiosyncratic weekly mask variation.
    #[arg(long, default_value_t = 3.0)]
    pub mask_noise_sd: f64,
    /// True mask coefficient.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub true_beta: f64,
    /// Sd of weekly outcome noise.
    #[arg(long, default_value_t = 8.0)]
    pub noise_sd: f64,
    /// Synthetic countries.
    #[arg(long, default_value_t = 24)]
    pub countries: usize,
    /// Synthetic weeks.
    #[arg(long, default_value_t = 104)]
    pub weeks: usize,
    /// Lags as `a:b` or a comma list.
    #[arg(long, default_value = "-1:4", allow_hyphen_values = true)]
    pub lags: String,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(subcommand)]
    pub kind: PlotKind,
}

#[derive(Debug, Subcommand)]
pub enum PlotKind {
    /// Pooled mortality curve with phase boundaries (phases.svg).
    Phases,
    /// One figure per country with waves, begin and peak windows (waves/<country>.svg).
    Waves,
    /// Scatter of two columns (scatter_<x>_<y>.svg).
    Scatter {
        /// Column on the horizontal axis.
        #[arg(long)]
        x: String,
        /// Column on the vertical axis.
        #[arg(long)]
        y: String,
    },
    /// Residuals against time, one panel per country (residuals_<outcome>_lag<d>.svg).
    Residuals {
        /// Outcome series.
        #[arg(long, value_enum, default_value_t = OutcomeArg::Cumulative)]
        outcome: OutcomeArg,
        /// Lags as `a:b` or a comma list.
        #[arg(long, default_value = "1:4", allow_hyphen_values = true)]
        lags: String,
    },
    /// TWFE estimates with intervals across lags (twfe_lags.svg).
    Lags {
        /// Lags as `a:b` or a comma list.
        #[arg(long, default_value = "-1:4", allow_hyphen_values = true)]
        lags: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
