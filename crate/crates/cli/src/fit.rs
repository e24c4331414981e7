//! `fit`: one-sample analysis.

use curesurv::inference::{bootstrap_vector, VectorBootstrap};
use curesurv::km::km_fit_both;
use curesurv::susceptible::{phi_hat, susceptible_curve, PhiCurve};
use curesurv::Sample;
use serde_json::{json, Value};

use crate::analysis::{
    curve_grid, ensure_dir, load_sample, purpose, stream_seed, write_file, EtaChoice,
};
use crate::args::{Emit, FitArgs};
use crate::curves::{pointwise_band, Band, CurveTable};
use crate::error::CliError;
use crate::svg::{Plot, Series};

/// Everything `fit` computes, before it is written out.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub grid: Vec<f64>,
    pub survival: CurveTable,
    pub censoring: CurveTable,
    pub susceptible: CurveTable,
    pub phi: CurveTable,
    pub eta: EtaChoice,
    pub eta_interval: Option<(f64, f64)>,
    pub eta_sd: Option<f64>,
    pub form_divergence: Option<f64>,
    pub clamped: bool,
    pub boot_missing: usize,
}

fn phi_at(phi: &PhiCurve, t: f64) -> f64 {
    phi.value(t).unwrap_or(f64::NAN)
}

/// `[S | G | S_a | phi | eta]` on the grid. `None` when the cure model
/// cannot be fitted to the sample.
fn statistic(sample: &Sample, eta: &EtaChoice, grid: &[f64]) -> Option<Vec<f64>> {
    let estimate = eta.method.estimate(sample).ok()?;
    let (s, g) = km_fit_both(sample);
    let sa = susceptible_curve(sample, &estimate).ok()?;
    let phi = phi_hat(sample, &estimate).ok()?;
    let mut out = Vec::with_capacity(4 * grid.len() + 1);
    for f in [&s, &g, &sa.curve] {
        out.extend(grid.iter().map(|&t| f.at(t)));
    }
    out.extend(grid.iter().map(|&t| phi_at(&phi, t)));
    out.push(estimate.value);
    Some(out)
}

pub fn fit_sample(sample: &Sample, args: &FitArgs) -> Result<FitResult, CliError> {
    let c = &args.common;
    let eta = EtaChoice::from_args(sample, c, stream_seed(c.seed, purpose::SELECT_B))?;
    let sa = susceptible_curve(sample, &eta.estimate).map_err(CliError::estimation)?;
    let grid = curve_grid(&[sample], c.grid.as_ref().map(|g| g.0.as_slice()));
    let m = grid.len();

    let point = statistic(sample, &eta, &grid)
        .ok_or_else(|| CliError::Estimation("cure model undefined on the sample".to_string()))?;
    let boot: Option<VectorBootstrap> = if c.boot >= 2 {
        let b = bootstrap_vector(
            std::slice::from_ref(sample),
            c.boot,
            stream_seed(c.seed, purpose::BANDS),
            |s| statistic(&s[0], &eta, &grid),
        )
        .map_err(CliError::estimation)?;
        Some(b)
    } else {
        None
    };
    let band = |k: usize| -> Option<Band> {
        boot.as_ref()
            .map(|b| pointwise_band(b, k * m..(k + 1) * m, c.level))
    };
    let table = |k: usize| {
        CurveTable::new(grid.clone(), point[k * m..(k + 1) * m].to_vec()).with_band(band(k))
    };
    let eta_band = boot
        .as_ref()
        .map(|b| pointwise_band(b, 4 * m..4 * m + 1, c.level));

    Ok(FitResult {
        survival: table(0),
        censoring: table(1),
        susceptible: table(2),
        phi: table(3),
        eta_interval: eta_band.as_ref().map(|b| (b.lo[0], b.hi[0])),
        eta_sd: eta_band.as_ref().map(|b| b.sd[0]),
        form_divergence: sa.form_divergence,
        clamped: sa.clamped,
        boot_missing: boot.as_ref().map_or(0, |b| b.missing),
        grid,
        eta,
    })
}

pub fn summary_text(label: &str, fit: &FitResult) -> String {
    let mut s = format!("{label}eta = {:.4}\n", fit.eta.estimate.value);
    s.push_str(&format!("{label}eta_method = {}\n", method_name(&fit.eta)));
    if let Some(b) = fit.eta.b() {
        s.push_str(&format!("{label}b = {b}\n"));
    }
    if let Some((lo, hi)) = fit.eta_interval {
        s.push_str(&format!("{label}eta_ci = ({lo:.4}, {hi:.4})\n"));
    }
    s
}

pub fn method_name(eta: &EtaChoice) -> &'static str {
    match (eta.b(), eta.estimate.is_tail()) {
        (None, _) => "tail",
        (Some(_), true) => "extrapolated (degenerate window, tail fallback)",
        (Some(_), false) => "extrapolated",
    }
}

pub fn fit_json(fit: &FitResult) -> Value {
    json!({
        "eta": fit.eta.to_json(),
        "eta_sd": fit.eta_sd,
        "eta_interval": fit.eta_interval,
        "form_divergence": fit.form_divergence,
        "susceptible_clamped": fit.clamped,
        "bootstrap_missing": fit.boot_missing,
    })
}

fn curve_plot(title: &str, y: &str, t: &CurveTable) -> Plot {
    let mut s = Series::step(y, &t.t, &t.value);
    if let Some(b) = &t.band {
        s = s.band(&b.lo, &b.hi);
    }
    Plot::new(title, "t", y).with(s)
}

pub fn run_fit(args: &FitArgs) -> Result<FitResult, CliError> {
    let c = &args.common;
    c.validate()?;
    let (sample, warnings) = load_sample(&c.input)?;
    let fit = fit_sample(&sample, args)?;
    ensure_dir(&c.out)?;

    if c.emits(Emit::Csv) {
        write_file(&c.out, "survival.csv", &fit.survival.to_csv())?;
        write_file(&c.out, "censoring.csv", &fit.censoring.to_csv())?;
        write_file(&c.out, "susceptible.csv", &fit.susceptible.to_csv())?;
        write_file(&c.out, "phi.csv", &fit.phi.to_csv())?;
    }
    if c.emits(Emit::Svg) {
        write_file(
            &c.out,
            "survival.svg",
            &curve_plot("Kaplan-Meier", "S(t)", &fit.survival)
                .y_range(0.0, 1.0)
                .render(),
        )?;
        write_file(
            &c.out,
            "censoring.svg",
            &curve_plot("Censoring KM", "G(t)", &fit.censoring)
                .y_range(0.0, 1.0)
                .render(),
        )?;
        write_file(
            &c.out,
            "susceptible.svg",
            &curve_plot("Susceptible survival", "S_a(t)", &fit.susceptible)
                .y_range(0.0, 1.0)
                .render(),
        )?;
        write_file(
            &c.out,
            "phi.svg",
            &curve_plot("Susceptible share of risk set", "phi(t)", &fit.phi)
                .y_range(0.0, 1.0)
                .render(),
        )?;
    }
    if c.emits(Emit::Report) {
        let report = json!({
            "inputs": {
                "command": "fit",
                "input": c.input.display().to_string(),
                "n": sample.len(),
                "events": sample.event_count(),
                "seed": c.seed,
                "boot": c.boot,
                "level": c.level,
                "eta_method": method_name(&fit.eta),
            },
            "estimates": {
                "eta": fit.eta.estimate.value,
                "b": fit.eta.b(),
                "grid": fit.grid,
                "survival": fit.survival.value,
                "censoring": fit.censoring.value,
                "susceptible": fit.susceptible.value,
                "phi": fit.phi.value,
            },
            "intervals": {
                "eta": fit.eta_interval,
                "survival": band_json(&fit.survival),
                "censoring": band_json(&fit.censoring),
                "susceptible": band_json(&fit.susceptible),
                "phi": band_json(&fit.phi),
            },
            "diagnostics": {
                "fit": fit_json(&fit),
                "warnings": warnings.iter().map(ToString::to_string).collect::<Vec<_>>(),
            },
        });
        write_file(&c.out, "report.json", &to_pretty(&report))?;
    }
    write_file(&c.out, "summary.txt", &summary_text("", &fit))?;
    Ok(fit)
}

pub fn band_json(t: &CurveTable) -> Value {
    match &t.band {
        None => Value::Null,
        Some(b) => json!({ "sd": b.sd, "lo": b.lo, "hi": b.hi }),
    }
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
