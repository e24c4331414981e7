use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::grid::GridArg;

#[derive(Debug, Clone, Parser)]
#[command(name = "curesurv", version, about = "Cure-fraction survival analysis")]
pub struct Cli {
    /// Worker threads for bootstrap and simulation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fit one sample: KM, censoring KM, cure fraction, latency survival, phi.
    Fit(FitArgs),
    /// Compare two arms: per-arm fits, tau processes, cure-rate difference.
    Compare(CompareArgs),
    /// Run a Monte Carlo experiment from a named preset or a JSON file.
    Simulate(SimulateArgs),
    /// Tabulate the bootstrap criterion used to choose the scale `b`.
    Btune(BtuneArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EtaMethodArg {
    Tail,
    Extrapolate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Csv,
    Svg,
    Report,
}

/// `auto` or a fixed scale in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BArg {
    Auto,
    Value(f64),
}

impl std::str::FromStr for BArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BArg::Auto);
        }
        s.parse::<f64>()
            .map(BArg::Value)
            .map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

/// Flags shared by `fit` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    /// CSV with columns `time,status[,arm]`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Bootstrap replicates for the pointwise bands; 0 disables them.
    #[arg(long, default_value_t = 200)]
    pub boot: usize,
    #[arg(long, value_enum, default_value_t = EtaMethodArg::Tail)]
    pub eta_method: EtaMethodArg,
    /// Extrapolation scale: `auto` (bootstrap selection) or a value in (0, 1).
    #[arg(long, default_value = "auto")]
    pub b: BArg,
    /// Replicates used by the automatic choice of `b`.
    #[arg(long, default_value_t = 500)]
    pub b_replicates: usize,
    /// Evaluation grid: `t1,t2,...` or `start:stop:step`. Default: observed times.
    #[arg(long)]
    pub grid: Option<GridArg>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Csv, Emit::Svg, Emit::Report])]
    pub emit: Vec<Emit>,
}

impl AnalysisArgs {
    pub fn validate(&self) -> Result<(), CliError> {
        validate_level(self.level)?;
        validate_boot(self.boot, "--boot")?;
        if let BArg::Value(b) = self.b {
            if !(b > 0.0 && b < 1.0) {
                return Err(CliError::Validation(format!(
                    "--b must lie in (0, 1), got {b}"
                )));
            }
        }
        if self.eta_method == EtaMethodArg::Extrapolate
            && self.b == BArg::Auto
            && self.b_replicates == 0
        {
            return Err(CliError::Validation(
                "--b-replicates must be positive when --b auto".to_string(),
            ));
        }
        if !self.input.is_file() {
            return Err(CliError::Validation(format!(
                "input file {} does not exist",
                self.input.display()
            )));
        }
        Ok(())
    }

    pub fn emits(&self, e: Emit) -> bool {
        self.emit.contains(&e)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Named preset (see `--list`).
    #[arg(long, conflicts_with = "scenario_file")]
    pub scenario: Option<String>,
    /// JSON experiment definition.
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    /// Print the preset names and exit.
    #[arg(long)]
    pub list: bool,
    /// Write one dataset drawn from the scenario to this CSV and exit.
    #[arg(long)]
    pub draw: Option<PathBuf>,
    /// Monte Carlo runs (overrides the file).
    #[arg(long)]
    pub runs: Option<usize>,
    /// Bootstrap replicates per run (overrides the file).
    #[arg(long)]
    pub boot: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Emit::Csv, Emit::Report])]
    pub emit: Vec<Emit>,
}

#[derive(Debug, Clone, Args)]
pub struct BtuneArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub boot: usize,
    /// Candidate scales: `b1,b2,...` or `start:stop:step`. Default 0.10:0.90:0.05.
    #[arg(long)]
    pub b_grid: Option<GridArg>,
    /// Restrict to one arm of a labelled input.
    #[arg(long)]
    pub arm: Option<u8>,
}

pub fn validate_level(level: f64) -> Result<(), CliError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "--level must lie in (0, 1), got {level}"
        )))
    }
}

pub fn validate_boot(boot: usize, flag: &str) -> Result<(), CliError> {
    if boot == 1 {
        return Err(CliError::Validation(format!(
            "{flag} must be 0 or at least 2"
        )));
    }
    Ok(())
}
