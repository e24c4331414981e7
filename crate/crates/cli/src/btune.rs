//! `btune`: the selection criterion for the extrapolation scale, per grid point.

use std::fmt::Write as _;

use curesurv::cure_rate::{default_b_grid, select_b, BSelection};
use curesurv::Arm;
use serde_json::json;

use crate::analysis::{ensure_dir, load_sample, write_file};
use crate::args::{validate_boot, BtuneArgs};
use crate::error::CliError;
use crate::fit::to_pretty;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

/// `b,eta,boot_mean,criterion,boot_valid`; undefined entries are `NaN`.
pub fn diagnostics_csv(sel: &BSelection) -> String {
    let mut out = String::from("b,eta,boot_mean,criterion,boot_valid\n");
    for d in &sel.diagnostics {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            d.b,
            opt(d.eta),
            opt(d.boot_mean),
            opt(d.criterion),
            d.boot_valid
        );
    }
    out
}

pub fn run_btune(args: &BtuneArgs) -> Result<BSelection, CliError> {
    validate_boot(args.boot, "--boot")?;
    if args.boot == 0 {
        return Err(CliError::Validation(
            "--boot must be at least 2".to_string(),
        ));
    }
    let grid = args
        .b_grid
        .as_ref()
        .map_or_else(default_b_grid, |g| g.0.clone());
    if let Some(&b) = grid.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
        return Err(CliError::Validation(format!(
            "b grid values must lie in (0, 1), got {b}"
        )));
    }
    let arm = args
        .arm
        .map(|a| {
            Arm::from_index(a)
                .ok_or_else(|| CliError::Validation(format!("--arm must be 0 or 1, got {a}")))
        })
        .transpose()?;
    let (sample, _) = load_sample(&args.input)?;
    let sample = match arm {
        Some(a) => sample.arm(a),
        None => sample,
    };
    if sample.event_count() == 0 {
        return Err(CliError::Validation(
            "no events in the selected sample".to_string(),
        ));
    }
    let sel = select_b(&sample, &grid, args.boot, args.seed).map_err(CliError::estimation)?;
    ensure_dir(&args.out)?;
    write_file(&args.out, "btune.csv", &diagnostics_csv(&sel))?;
    let doc = json!({
        "inputs": { "command": "btune", "input": args.input.display().to_string(), "arm": args.arm, "seed": args.seed, "boot": args.boot, "grid": grid },
        "estimates": { "b_star": sel.b_star, "eta": sel.estimate },
        "intervals": null,
        "diagnostics": sel.diagnostics,
    });
    write_file(&args.out, "report.json", &to_pretty(&doc))?;
    write_file(
        &args.out,
        "summary.txt",
        &format!("b_star = {}\neta = {:.4}\n", sel.b_star, sel.estimate.value),
    )?;
    Ok(sel)
}
