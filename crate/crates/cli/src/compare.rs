//! `compare`: two-arm analysis laid out as six panels.
//!
//! A: KM curves per arm. B: overall tau. C: latency survival per arm with
//! tail cure rates. D: susceptible tau with tail cure rates. E and F: the
//! same with extrapolated cure rates.

use curesurv::inference::{
    bootstrap_vector, cure_difference_test, DifferenceMethod, TestResult, VectorBootstrap,
};
use curesurv::km::{km_fit, KmTarget};
use curesurv::sample_io::Issue;
use curesurv::susceptible::susceptible_curve;
use curesurv::tau::{tau_a_curve, tau_curve};
use curesurv::{Arm, Sample};
use serde_json::json;

use crate::analysis::{
    curve_grid, ensure_dir, load_sample, purpose, stream_seed, write_file, EtaChoice,
};
use crate::args::{CompareArgs, Emit, EtaMethodArg};
use crate::curves::{pointwise_band, CurveTable};
use crate::error::CliError;
use crate::fit::{band_json, method_name, to_pretty};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone)]
pub struct CompareResult {
    pub grid: Vec<f64>,
    pub km: [CurveTable; 2],
    pub tau: CurveTable,
    pub susceptible_tail: [CurveTable; 2],
    pub tau_a_tail: CurveTable,
    pub susceptible_ext: [CurveTable; 2],
    pub tau_a_ext: CurveTable,
    pub eta_tail: [EtaChoice; 2],
    pub eta_ext: [EtaChoice; 2],
    pub test: TestResult,
    pub boot_missing: usize,
}

impl CompareResult {
    /// `(file stem, table)` for every curve file.
    pub fn files(&self) -> Vec<(String, &CurveTable)> {
        let mut v = Vec::new();
        for arm in 0..2 {
            v.push((format!("panel_a_arm{arm}"), &self.km[arm]));
        }
        v.push(("panel_b_tau".to_string(), &self.tau));
        for arm in 0..2 {
            v.push((format!("panel_c_arm{arm}"), &self.susceptible_tail[arm]));
        }
        v.push(("panel_d_tau_a".to_string(), &self.tau_a_tail));
        for arm in 0..2 {
            v.push((format!("panel_e_arm{arm}"), &self.susceptible_ext[arm]));
        }
        v.push(("panel_f_tau_a".to_string(), &self.tau_a_ext));
        v
    }
}

/// Labelled input split into arms; each must be non-empty with at least one
/// event.
pub fn split_checked(sample: &Sample) -> Result<(Sample, Sample), CliError> {
    if !sample.has_arms() {
        return Err(CliError::Validation(
            "compare needs an `arm` column with a label on every row".to_string(),
        ));
    }
    let (s0, s1) = sample
        .split_arms()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (arm, s) in [(Arm::Zero, &s0), (Arm::One, &s1)] {
        if s.is_empty() {
            return Err(CliError::Validation(format!("arm {arm} has no subjects")));
        }
        if s.event_count() == 0 {
            return Err(CliError::Validation(
                Issue::AllCensoredArm { arm }.to_string(),
            ));
        }
    }
    Ok((s0, s1))
}

fn nan_if_none(v: Option<Vec<f64>>, len: usize) -> Vec<f64> {
    v.unwrap_or_else(|| vec![f64::NAN; len])
}

/// Bootstrap statistic: nine blocks of `grid.len()` values (KM x2, tau,
/// latency x2, tau_a, latency x2, tau_a). Blocks that cannot be computed on a
/// resample are NaN so the other blocks keep their replicate.
fn statistic(s: &[Sample], tail: &[EtaChoice; 2], ext: &[EtaChoice; 2], grid: &[f64]) -> Vec<f64> {
    let m = grid.len();
    let (s0, s1) = (&s[0], &s[1]);
    let mut out = Vec::with_capacity(10 * m);
    for arm in [s0, s1] {
        let km = km_fit(arm, KmTarget::Event);
        out.extend(grid.iter().map(|&t| km.at(t)));
    }
    out.extend(nan_if_none(
        tau_curve(s0, s1, Some(grid)).ok().map(|c| c.values),
        m,
    ));
    for choice in [tail, ext] {
        let etas: Vec<_> = [s0, s1]
            .iter()
            .zip(choice.iter())
            .map(|(a, c)| c.method.estimate(a).ok())
            .collect();
        for (arm, eta) in [s0, s1].iter().zip(&etas) {
            let sa = eta
                .as_ref()
                .and_then(|e| susceptible_curve(arm, e).ok())
                .map(|c| grid.iter().map(|&t| c.curve.at(t)).collect());
            out.extend(nan_if_none(sa, m));
        }
        let tau_a = match (&etas[0], &etas[1]) {
            (Some(e0), Some(e1)) => tau_a_curve(s0, s1, e0, e1, Some(grid))
                .ok()
                .map(|c| c.values),
            _ => None,
        };
        out.extend(nan_if_none(tau_a, m));
    }
    out
}

pub fn compare_arms(
    s0: &Sample,
    s1: &Sample,
    args: &CompareArgs,
) -> Result<CompareResult, CliError> {
    let c = &args.common;
    let grid = curve_grid(&[s0, s1], c.grid.as_ref().map(|g| g.0.as_slice()));
    let m = grid.len();
    let eta_tail = [EtaChoice::tail(s0)?, EtaChoice::tail(s1)?];
    let select_seed = stream_seed(c.seed, purpose::SELECT_B);
    let eta_ext = [
        EtaChoice::extrapolated(s0, c.b, c.b_replicates, stream_seed(select_seed, 0))?,
        EtaChoice::extrapolated(s1, c.b, c.b_replicates, stream_seed(select_seed, 1))?,
    ];

    // point estimates must exist; resamples may fail block-wise
    let samples = [s0.clone(), s1.clone()];
    tau_curve(s0, s1, Some(&grid)).map_err(CliError::estimation)?;
    for e in [&eta_tail, &eta_ext] {
        tau_a_curve(s0, s1, &e[0].estimate, &e[1].estimate, Some(&grid))
            .map_err(CliError::estimation)?;
        for (s, choice) in samples.iter().zip(e.iter()) {
            susceptible_curve(s, &choice.estimate).map_err(CliError::estimation)?;
        }
    }
    let point = statistic(&samples, &eta_tail, &eta_ext, &grid);

    let boot: Option<VectorBootstrap> = if c.boot >= 2 {
        let b = bootstrap_vector(&samples, c.boot, stream_seed(c.seed, purpose::BANDS), |s| {
            Some(statistic(s, &eta_tail, &eta_ext, &grid))
        })
        .map_err(CliError::estimation)?;
        Some(b)
    } else {
        None
    };
    let table = |block: usize| {
        let band = boot
            .as_ref()
            .map(|b| pointwise_band(b, block * m..(block + 1) * m, c.level));
        CurveTable::new(grid.clone(), point[block * m..(block + 1) * m].to_vec()).with_band(band)
    };

    let method = match c.eta_method {
        EtaMethodArg::Tail => DifferenceMethod::Tail,
        EtaMethodArg::Extrapolate => DifferenceMethod::Extrapolated {
            b0: eta_ext[0].b().expect("extrapolated choice has b"),
            b1: eta_ext[1].b().expect("extrapolated choice has b"),
        },
    };
    let test_boot = if c.boot >= 2 { c.boot } else { 200 };
    let test = cure_difference_test(
        s0,
        s1,
        method,
        test_boot,
        stream_seed(c.seed, purpose::DIFFERENCE),
        c.level,
    )
    .map_err(CliError::estimation)?;

    Ok(CompareResult {
        km: [table(0), table(1)],
        tau: table(2).tau(),
        susceptible_tail: [table(3), table(4)],
        tau_a_tail: table(5).tau(),
        susceptible_ext: [table(6), table(7)],
        tau_a_ext: table(8).tau(),
        boot_missing: boot.as_ref().map_or(0, |b| b.missing),
        grid,
        eta_tail,
        eta_ext,
        test,
    })
}

fn arm_plot(title: &str, y: &str, tables: &[CurveTable; 2]) -> Plot {
    let mut p = Plot::new(title, "t", y).y_range(0.0, 1.0);
    for (arm, t) in tables.iter().enumerate() {
        let mut s = Series::step(format!("arm {arm}"), &t.t, &t.value);
        if let Some(b) = &t.band {
            s = s.band(&b.lo, &b.hi);
        }
        if arm == 0 {
            s = s.dashed();
        }
        p = p.with(s);
    }
    p
}

fn tau_plot(title: &str, y: &str, t: &CurveTable) -> Plot {
    let mut s = Series::step(y, &t.t, &t.value);
    if let Some(b) = &t.band {
        s = s.band(&b.lo, &b.hi);
    }
    Plot::new(title, "t", y).with(s)
}

pub fn summary_text(r: &CompareResult) -> String {
    let mut s = String::new();
    for arm in 0..2 {
        s.push_str(&format!(
            "arm{arm}.eta_tail = {:.4}\n",
            r.eta_tail[arm].estimate.value
        ));
        s.push_str(&format!(
            "arm{arm}.eta_extrapolated = {:.4} ({}, b = {})\n",
            r.eta_ext[arm].estimate.value,
            method_name(&r.eta_ext[arm]),
            r.eta_ext[arm].b().unwrap_or(f64::NAN)
        ));
    }
    s.push_str(&format!(
        "difference = {:.4} ({:.4}, {:.4}), p = {:.3e}\n",
        r.test.difference, r.test.ci.0, r.test.ci.1, r.test.p_value
    ));
    s
}

pub fn run_compare(args: &CompareArgs) -> Result<CompareResult, CliError> {
    let c = &args.common;
    c.validate()?;
    let (sample, warnings) = load_sample(&c.input)?;
    let (s0, s1) = split_checked(&sample)?;
    let r = compare_arms(&s0, &s1, args)?;
    ensure_dir(&c.out)?;

    if c.emits(Emit::Csv) {
        for (stem, table) in r.files() {
            write_file(&c.out, &format!("{stem}.csv"), &table.to_csv())?;
        }
    }
    if c.emits(Emit::Svg) {
        write_file(
            &c.out,
            "panel_a.svg",
            &arm_plot("(A) Kaplan-Meier", "S(t)", &r.km).render(),
        )?;
        write_file(
            &c.out,
            "panel_b.svg",
            &tau_plot("(B) tau", "tau(t)", &r.tau).render(),
        )?;
        write_file(
            &c.out,
            "panel_c.svg",
            &arm_plot(
                "(C) Susceptible survival, tail cure rates",
                "S_a(t)",
                &r.susceptible_tail,
            )
            .render(),
        )?;
        write_file(
            &c.out,
            "panel_d.svg",
            &tau_plot("(D) tau_a, tail cure rates", "tau_a(t)", &r.tau_a_tail).render(),
        )?;
        write_file(
            &c.out,
            "panel_e.svg",
            &arm_plot(
                "(E) Susceptible survival, extrapolated cure rates",
                "S_a(t)",
                &r.susceptible_ext,
            )
            .render(),
        )?;
        write_file(
            &c.out,
            "panel_f.svg",
            &tau_plot(
                "(F) tau_a, extrapolated cure rates",
                "tau_a(t)",
                &r.tau_a_ext,
            )
            .render(),
        )?;
    }
    write_file(&c.out, "cure_difference.txt", &r.test.to_kv())?;
    if c.emits(Emit::Report) {
        let mut estimates = serde_json::Map::new();
        let mut intervals = serde_json::Map::new();
        for (stem, table) in r.files() {
            estimates.insert(stem.clone(), json!(table.value));
            intervals.insert(stem, band_json(table));
        }
        estimates.insert("grid".to_string(), json!(r.grid));
        estimates.insert(
            "eta_tail".to_string(),
            json!([r.eta_tail[0].estimate.value, r.eta_tail[1].estimate.value]),
        );
        estimates.insert(
            "eta_extrapolated".to_string(),
            json!([r.eta_ext[0].estimate.value, r.eta_ext[1].estimate.value]),
        );
        estimates.insert("cure_difference".to_string(), json!(r.test));
        intervals.insert("cure_difference".to_string(), json!(r.test.ci));
        let report = json!({
            "inputs": {
                "command": "compare",
                "input": c.input.display().to_string(),
                "n": [s0.len(), s1.len()],
                "events": [s0.event_count(), s1.event_count()],
                "seed": c.seed,
                "boot": c.boot,
                "level": c.level,
                "eta_method": match c.eta_method { EtaMethodArg::Tail => "tail", EtaMethodArg::Extrapolate => "extrapolate" },
            },
            "estimates": estimates,
            "intervals": intervals,
            "diagnostics": {
                "eta_tail": [r.eta_tail[0].to_json(), r.eta_tail[1].to_json()],
                "eta_extrapolated": [r.eta_ext[0].to_json(), r.eta_ext[1].to_json()],
                "bootstrap_missing": r.boot_missing,
                "warnings": warnings.iter().map(ToString::to_string).collect::<Vec<_>>(),
            },
        });
        write_file(&c.out, "report.json", &to_pretty(&report))?;
    }
    write_file(&c.out, "summary.txt", &summary_text(&r))?;
    Ok(r)
}
