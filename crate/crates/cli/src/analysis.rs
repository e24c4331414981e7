//! Input loading and cure-rate resolution shared by `fit` and `compare`.

use std::fs;
use std::path::Path;

use curesurv::cure_rate::{default_b_grid, select_b, BSelection};
use curesurv::inference::EtaMethod;
use curesurv::rng::derive_seed;
use curesurv::sample_io::{parse_csv, validate, Issue};
use curesurv::{CureRateEstimate, Sample};
use serde_json::{json, Value};

use crate::args::{AnalysisArgs, BArg, EtaMethodArg};
use crate::error::CliError;

/// Seed offsets for the independent random streams of one command.
pub mod purpose {
    pub const BANDS: u64 = 1;
    pub const SELECT_B: u64 = 2;
    pub const DIFFERENCE: u64 = 3;
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Parse and validate; fatal issues become validation errors, warnings are
/// returned for the report.
pub fn load_sample(path: &Path) -> Result<(Sample, Vec<Issue>), CliError> {
    let text = read_to_string(path)?;
    let sample =
        parse_csv(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let report = validate(&sample);
    if let Some(issue) = report.fatal.first() {
        return Err(CliError::Validation(issue.to_string()));
    }
    Ok((sample, report.warnings))
}

/// The cure-rate estimate used for a sample, with the method the bootstrap
/// re-applies to each resample.
#[derive(Debug, Clone)]
pub struct EtaChoice {
    pub estimate: CureRateEstimate,
    pub method: EtaMethod,
    pub selection: Option<BSelection>,
}

impl EtaChoice {
    pub fn tail(sample: &Sample) -> Result<Self, CliError> {
        let method = EtaMethod::Tail;
        Ok(EtaChoice {
            estimate: method.estimate(sample).map_err(CliError::estimation)?,
            method,
            selection: None,
        })
    }

    /// Extrapolated estimate with `b` fixed or selected; degenerate windows
    /// fall back to the tail estimate.
    pub fn extrapolated(
        sample: &Sample,
        b: BArg,
        b_replicates: usize,
        seed: u64,
    ) -> Result<Self, CliError> {
        let (b, selection) = match b {
            BArg::Value(b) => (b, None),
            BArg::Auto => {
                let sel = select_b(sample, &default_b_grid(), b_replicates, seed)
                    .map_err(CliError::estimation)?;
                (sel.b_star, Some(sel))
            }
        };
        let method = EtaMethod::ExtrapolatedOrTail { b };
        Ok(EtaChoice {
            estimate: method.estimate(sample).map_err(CliError::estimation)?,
            method,
            selection,
        })
    }

    pub fn from_args(sample: &Sample, args: &AnalysisArgs, seed: u64) -> Result<Self, CliError> {
        match args.eta_method {
            EtaMethodArg::Tail => EtaChoice::tail(sample),
            EtaMethodArg::Extrapolate => {
                EtaChoice::extrapolated(sample, args.b, args.b_replicates, seed)
            }
        }
    }

    pub fn b(&self) -> Option<f64> {
        match self.method {
            EtaMethod::ExtrapolatedOrTail { b } | EtaMethod::Extrapolated { b } => Some(b),
            EtaMethod::Tail => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": self.estimate.value,
            "raw_value": self.estimate.raw_value,
            "method": self.estimate.method,
            "b": self.b(),
            "fallback_to_tail": self.b().is_some() && self.estimate.is_tail(),
            "b_selection": self.selection.as_ref().map(|s| json!({
                "b_star": s.b_star,
                "diagnostics": s.diagnostics,
            })),
        })
    }
}

/// Evaluation grid: explicit, or 0 followed by the distinct observed times.
pub fn curve_grid(samples: &[&Sample], explicit: Option<&[f64]>) -> Vec<f64> {
    if let Some(g) = explicit {
        return g.to_vec();
    }
    let mut t: Vec<f64> = std::iter::once(0.0)
        .chain(
            samples
                .iter()
                .flat_map(|s| s.subjects().iter().map(|x| x.time)),
        )
        .collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

pub fn stream_seed(seed: u64, purpose: u64) -> u64 {
    derive_seed(seed, purpose)
}
