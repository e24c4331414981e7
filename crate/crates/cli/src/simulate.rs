//! `simulate`: Monte Carlo experiments from presets or JSON files.

use std::fmt::Write as _;

use curesurv::sample_io::to_csv;
use curesurv::simlab::{
    draw_sample, draw_two_arm, preset, run_experiment, Design, Experiment, ExperimentReport,
    SimError, PRESET_NAMES,
};
use curesurv::Sample;
use serde_json::json;

use crate::analysis::{ensure_dir, read_to_string, write_file};
use crate::args::{validate_level, Emit, SimulateArgs};
use crate::error::CliError;
use crate::fit::to_pretty;

pub const DEFAULT_RUNS: usize = 200;
pub const DEFAULT_BOOT: usize = 500;
pub const DEFAULT_SEED: u64 = 1;

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::AllRunsFailed(_) | SimError::Truth(_) => CliError::Estimation(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

/// Experiment named by the flags, with command-line overrides applied.
pub fn resolve_experiment(args: &SimulateArgs) -> Result<(String, Experiment), CliError> {
    let (name, mut exp) = match (&args.scenario, &args.scenario_file) {
        (Some(name), None) => {
            let p = preset(name).map_err(sim_error)?;
            let exp = p.experiment(
                args.runs.unwrap_or(DEFAULT_RUNS),
                args.boot.unwrap_or(DEFAULT_BOOT),
                args.seed.unwrap_or(DEFAULT_SEED),
            );
            (name.clone(), exp)
        }
        (None, Some(path)) => {
            let text = read_to_string(path)?;
            let exp: Experiment = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), exp)
        }
        _ => {
            return Err(CliError::Validation(
                "simulate needs exactly one of --scenario or --scenario-file".to_string(),
            ))
        }
    };
    if args.scenario_file.is_some() {
        if let Some(r) = args.runs {
            exp.runs = r;
        }
        if let Some(b) = args.boot {
            exp.replicates = b;
        }
        if let Some(s) = args.seed {
            exp.seed = s;
        }
    }
    if let Some(l) = args.level {
        validate_level(l)?;
        exp.level = l;
    }
    if exp.runs < 2 || exp.replicates < 2 {
        return Err(sim_error(SimError::TooSmall {
            runs: exp.runs,
            replicates: exp.replicates,
        }));
    }
    Ok((name, exp))
}

/// One dataset from the design; two-arm designs come back labelled.
pub fn draw_dataset(design: &Design, seed: u64) -> Result<Sample, SimError> {
    match design {
        Design::OneArm { scenario } => {
            scenario.validate()?;
            Ok(draw_sample(scenario, seed))
        }
        Design::TwoArm { arm0, arm1 } => {
            arm0.validate()?;
            arm1.validate()?;
            let (s0, s1) = draw_two_arm(arm0, arm1, seed);
            Ok(Sample::from_arms(&s0, &s1))
        }
    }
}

/// One line per successful run and evaluation point: `run,point,estimate,sd`.
pub fn estimates_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("run,point,estimate,sd\n");
    for (run, o) in report.outcomes.iter().enumerate() {
        let Some(o) = o else { continue };
        for (k, (e, sd)) in o.estimates.iter().zip(&o.sds).enumerate() {
            let point = report
                .rows
                .get(k)
                .map(|r| r.t.to_string())
                .unwrap_or_default();
            let _ = writeln!(out, "{run},{point},{e},{sd}");
        }
    }
    out
}

pub fn run_simulate(args: &SimulateArgs) -> Result<Option<ExperimentReport>, CliError> {
    if args.list {
        for name in PRESET_NAMES {
            let p = preset(name).map_err(sim_error)?;
            println!("{name:<18} {}", p.description);
        }
        return Ok(None);
    }
    let (name, exp) = resolve_experiment(args)?;
    if let Some(path) = &args.draw {
        let sample = draw_dataset(&exp.design, exp.seed).map_err(sim_error)?;
        std::fs::write(path, to_csv(&sample)).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        return Ok(None);
    }
    let report = run_experiment(&exp).map_err(sim_error)?;
    ensure_dir(&args.out)?;
    let emits = |e| args.emit.contains(&e);
    if emits(Emit::Csv) {
        write_file(&args.out, "experiment.csv", &report.to_csv())?;
        write_file(&args.out, "table.csv", &report.to_wide_csv())?;
        write_file(&args.out, "estimates.csv", &estimates_csv(&report))?;
    }
    if emits(Emit::Report) {
        let b_star: Vec<Option<f64>> = report
            .outcomes
            .iter()
            .map(|o| o.as_ref().and_then(|o| o.b_star))
            .collect();
        let doc = json!({
            "inputs": { "command": "simulate", "scenario": name, "experiment": exp },
            "estimates": report.rows,
            "intervals": { "level": exp.level },
            "diagnostics": {
                "runs_requested": report.runs_requested,
                "failed_runs": report.failed_runs,
                "b_star": b_star,
            },
        });
        write_file(&args.out, "report.json", &to_pretty(&doc))?;
    }
    let mut summary = format!(
        "scenario = {name}\nruns = {}\nreplicates = {}\nfailed_runs = {}\n",
        exp.runs,
        exp.replicates,
        report.failed_runs.len()
    );
    summary.push_str(&report.to_wide_csv());
    write_file(&args.out, "summary.txt", &summary)?;
    Ok(Some(report))
}
