//! Mixture-cure scenario generators and the Monte Carlo experiment runner.
//!
//! A subject is cured with probability `eta` (event time `+inf`), otherwise
//! its event time is drawn from the latency law. Censoring is
//! `Uniform(0, c_max)`.
//!
//! Run `k` of an experiment derives its sample, bootstrap and b-selection
//! streams from `(seed, k)` alone, so the rows are identical whatever the
//! thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cure_rate::{select_b, CureRateEstimate, DEFAULT_B_REPLICATES};
use crate::dist::{DistError, DistributionSpec};
use crate::inference::{bootstrap_vector, normal_quantile, sample_sd, EtaMethod, InferenceError};
use crate::km::{km_fit, KmTarget};
use crate::rng::{derive_seed, stream};
use crate::sample_io::{Arm, Sample, Subject};
use crate::sum::compensated_sum;
use crate::susceptible::location_scale;
use crate::tau::{tau_a_curve, true_tau_quadrature, TauError, TauKind};

pub use crate::dist::truncated_weibull_sample;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("cure fraction {0} must lie in [0, 1)")]
    BadEta(f64),
    #[error("censoring bound {0} must be positive")]
    BadCensoring(f64),
    #[error("sample size must be positive")]
    EmptyScenario,
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error("need at least 2 runs and 2 bootstrap replicates (got {runs}, {replicates})")]
    TooSmall { runs: usize, replicates: usize },
    #[error("empty evaluation grid")]
    EmptyGrid,
    #[error("confidence level {0} must lie in (0, 1)")]
    BadLevel(f64),
    #[error("target needs a {expected} design")]
    DesignMismatch { expected: &'static str },
    #[error("all {0} runs failed")]
    AllRunsFailed(usize),
    #[error("truth: {0}")]
    Truth(#[from] TauError),
    #[error("unknown scenario preset `{0}`")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub latency: DistributionSpec,
    pub eta: f64,
    /// Censoring is `Uniform(0, c_max)`.
    pub c_max: f64,
    pub n: usize,
}

impl Scenario {
    pub fn new(
        latency: DistributionSpec,
        eta: f64,
        c_max: f64,
        n: usize,
    ) -> Result<Self, SimError> {
        let s = Scenario {
            latency,
            eta,
            c_max,
            n,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.latency.validate()?;
        if !(0.0..1.0).contains(&self.eta) {
            return Err(SimError::BadEta(self.eta));
        }
        if !(self.c_max.is_finite() && self.c_max > 0.0) {
            return Err(SimError::BadCensoring(self.c_max));
        }
        if self.n == 0 {
            return Err(SimError::EmptyScenario);
        }
        Ok(())
    }

    pub fn with_n(self, n: usize) -> Self {
        Scenario { n, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Scenario { eta, ..self }
    }

    /// Right endpoint of the latency support.
    pub fn support_end(&self) -> f64 {
        self.latency.support_end()
    }

    /// Right endpoint of the censoring support.
    pub fn censor_end(&self) -> f64 {
        self.c_max
    }

    pub fn sufficient_follow_up(&self) -> bool {
        self.support_end() <= self.censor_end()
    }

    fn draw_subject<R: Rng + ?Sized>(&self, rng: &mut R) -> Subject {
        let cured = rng.random::<f64>() < self.eta;
        let t = if cured {
            f64::INFINITY
        } else {
            self.latency.sample(rng)
        };
        let c = rng.random::<f64>() * self.c_max;
        Subject::new(t.min(c), t <= c)
    }

    pub fn draw_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        (0..self.n).map(|_| self.draw_subject(rng)).collect()
    }
}

/// One sample of `scenario.n` subjects from stream `(seed, 0)`.
pub fn draw_sample(scenario: &Scenario, seed: u64) -> Sample {
    scenario.draw_with(&mut stream(seed, 0))
}

/// Both arms, each from its own stream, labelled with their arm.
pub fn draw_two_arm(arm0: &Scenario, arm1: &Scenario, seed: u64) -> (Sample, Sample) {
    let label = |s: Sample, arm: Arm| -> Sample {
        s.subjects()
            .iter()
            .map(|x| Subject::with_arm(x.time, x.event, arm))
            .collect()
    };
    (
        label(arm0.draw_with(&mut stream(seed, 0)), Arm::Zero),
        label(arm1.draw_with(&mut stream(seed, 1)), Arm::One),
    )
}

/// Fraction of censored subjects in a sample of `n` draws.
pub fn censoring_rate(scenario: &Scenario, n: usize, seed: u64) -> f64 {
    let s = draw_sample(&scenario.with_n(n), seed);
    (s.len() - s.event_count()) as f64 / s.len() as f64
}

/// `count` random validation samples without tied times, each with at least
/// one event: `n` uniform on `[5, 200]`, a cure fraction uniform on
/// `[0, 0.5)`, exponential latency and `Uniform(0, c)` censoring with `c`
/// itself uniform on `[0.3, 4)`. Sample `k` comes from stream `(seed, k)`.
pub fn tie_free_corpus(count: usize, seed: u64) -> Vec<Sample> {
    (0..count as u64)
        .map(|k| {
            let mut rng = stream(seed, k);
            loop {
                let n = rng.random_range(5..=200);
                let eta = rng.random::<f64>() * 0.5;
                let c_max = rng.random_range(0.3..4.0);
                let s: Sample = (0..n)
                    .map(|_| {
                        let t = if rng.random::<f64>() < eta {
                            f64::INFINITY
                        } else {
                            -(1.0 - rng.random::<f64>()).ln()
                        };
                        let c = rng.random::<f64>() * c_max;
                        Subject::new(t.min(c), t <= c)
                    })
                    .collect();
                let mut times: Vec<f64> = s.subjects().iter().map(|x| x.time).collect();
                times.sort_by(f64::total_cmp);
                if s.event_count() > 0 && times.windows(2).all(|w| w[0] < w[1]) {
                    return s;
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Design {
    OneArm { scenario: Scenario },
    TwoArm { arm0: Scenario, arm1: Scenario },
}

/// Evaluation points: explicit times, or latency survival levels mapped to
/// times through the latency quantile function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum GridSpec {
    Times(Vec<f64>),
    SurvivalLevels(Vec<f64>),
}

impl GridSpec {
    pub fn default_levels() -> GridSpec {
        GridSpec::SurvivalLevels(vec![0.75, 0.65, 0.55, 0.45, 0.35, 0.25])
    }

    pub fn times(&self, latency: &DistributionSpec) -> Vec<f64> {
        match self {
            GridSpec::Times(t) => t.clone(),
            GridSpec::SurvivalLevels(levels) => {
                levels.iter().map(|&s| latency.quantile(1.0 - s)).collect()
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            GridSpec::Times(v) | GridSpec::SurvivalLevels(v) => v.is_empty(),
        }
    }
}

/// How the one-arm experiment estimates the cure fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CureEstimator {
    Tail,
    /// Extrapolated estimate with `b` chosen per run by [`select_b`]; the
    /// bootstrap then keeps that `b` fixed.
    SelectB {
        grid: Vec<f64>,
        replicates: usize,
    },
}

impl CureEstimator {
    pub fn select_b_default() -> CureEstimator {
        CureEstimator::SelectB {
            grid: crate::cure_rate::default_b_grid(),
            replicates: DEFAULT_B_REPLICATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// Latency survival at the grid times plus the cure fraction.
    SusceptibleAndEta { estimator: CureEstimator },
    /// Susceptible tau process at the grid times.
    TauA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub design: Design,
    pub target: Target,
    pub grid: GridSpec,
    pub runs: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_level() -> f64 {
    0.95
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowPoint {
    Time(f64),
    Cure,
}

impl std::fmt::Display for RowPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowPoint::Time(t) => write!(f, "{t}"),
            RowPoint::Cure => f.write_str("cure"),
        }
    }
}

/// Aggregate over runs at one evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub t: RowPoint,
    pub truth: f64,
    /// (a) mean of `estimate - truth`.
    pub avg_bias: f64,
    /// (b) mean bootstrap SD.
    pub sd_boot: f64,
    /// (c) SD of the point estimates across runs.
    pub sd_emp: f64,
    /// (d) fraction of intervals covering the truth.
    pub coverage: f64,
    /// (e) mean interval length.
    pub ci_len: f64,
    pub runs: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub estimates: Vec<f64>,
    pub sds: Vec<f64>,
    /// Chosen `b` for extrapolated runs.
    pub b_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub runs_requested: usize,
    /// Indices of runs whose estimator or bootstrap failed.
    pub failed_runs: Vec<usize>,
    /// Per-run outcomes, `None` for failed runs.
    pub outcomes: Vec<Option<RunOutcome>>,
}

impl ExperimentReport {
    /// CSV with columns `t,truth,a,b,c,d,e`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,truth,a,b,c,d,e\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.t, r.truth, r.avg_bias, r.sd_boot, r.sd_emp, r.coverage, r.ci_len
            ));
        }
        out
    }

    /// Table laid out with the evaluation points as columns and one line per
    /// row label, values rounded to 3 decimals.
    pub fn to_wide_csv(&self) -> String {
        let mut out = String::from("row");
        for r in &self.rows {
            match r.t {
                RowPoint::Time(t) => out.push_str(&format!(",{t:.3}")),
                RowPoint::Cure => out.push_str(",cure"),
            }
        }
        out.push('\n');
        let line = |label: &str, f: &dyn Fn(&ExperimentRow) -> f64| {
            let mut s = label.to_string();
            for r in &self.rows {
                s.push_str(&format!(",{:.3}", f(r)));
            }
            s.push('\n');
            s
        };
        out += &line("truth", &|r| r.truth);
        out += &line("(a)", &|r| r.avg_bias);
        out += &line("(b)", &|r| r.sd_boot);
        out += &line("(c)", &|r| r.sd_emp);
        out += &line("(d)", &|r| r.coverage);
        out += &line("(e)", &|r| r.ci_len);
        out
    }
}

fn one_arm_statistic(sample: &Sample, method: EtaMethod, times: &[f64]) -> Option<Vec<f64>> {
    let eta = method.estimate(sample).ok()?;
    if eta.value >= 1.0 {
        return None;
    }
    let km = km_fit(sample, KmTarget::Event);
    let (sa, _) = location_scale(&km, eta.value);
    let mut v: Vec<f64> = times.iter().map(|&t| sa.at(t)).collect();
    v.push(eta.value);
    Some(v)
}

fn run_seed(seed: u64, run: usize, purpose: u64) -> u64 {
    derive_seed(derive_seed(seed, run as u64), purpose)
}

fn one_arm_run(
    scenario: &Scenario,
    estimator: &CureEstimator,
    times: &[f64],
    replicates: usize,
    seed: u64,
    run: usize,
) -> Result<RunOutcome, InferenceError> {
    let sample = draw_sample(scenario, run_seed(seed, run, 0));
    let (method, b_star) = match estimator {
        CureEstimator::Tail => (EtaMethod::Tail, None),
        CureEstimator::SelectB {
            grid,
            replicates: rb,
        } => match select_b(&sample, grid, *rb, run_seed(seed, run, 2)) {
            Ok(sel) => (
                EtaMethod::ExtrapolatedOrTail { b: sel.b_star },
                Some(sel.b_star),
            ),
            Err(_) => (EtaMethod::Tail, None),
        },
    };
    let boot = bootstrap_vector(
        std::slice::from_ref(&sample),
        replicates,
        run_seed(seed, run, 1),
        |s| one_arm_statistic(&s[0], method, times),
    )?;
    Ok(RunOutcome {
        estimates: boot.point,
        sds: boot.sd,
        b_star,
    })
}

fn two_arm_run(
    arm0: &Scenario,
    arm1: &Scenario,
    times: &[f64],
    replicates: usize,
    seed: u64,
    run: usize,
) -> Result<RunOutcome, InferenceError> {
    let (s0, s1) = draw_two_arm(arm0, arm1, run_seed(seed, run, 0));
    let stat = |s: &[Sample]| -> Option<Vec<f64>> {
        let e0: CureRateEstimate = EtaMethod::Tail.estimate(&s[0]).ok()?;
        let e1 = EtaMethod::Tail.estimate(&s[1]).ok()?;
        Some(
            tau_a_curve(&s[0], &s[1], &e0, &e1, Some(times))
                .ok()?
                .values,
        )
    };
    let boot = bootstrap_vector(&[s0, s1], replicates, run_seed(seed, run, 1), stat)?;
    Ok(RunOutcome {
        estimates: boot.point,
        sds: boot.sd,
        b_star: None,
    })
}

/// Run the experiment and aggregate rows (a)-(e).
pub fn run_experiment(exp: &Experiment) -> Result<ExperimentReport, SimError> {
    if exp.runs < 2 || exp.replicates < 2 {
        return Err(SimError::TooSmall {
            runs: exp.runs,
            replicates: exp.replicates,
        });
    }
    if exp.grid.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    if !(exp.level > 0.0 && exp.level < 1.0) {
        return Err(SimError::BadLevel(exp.level));
    }

    let (points, truths, outcomes): (Vec<RowPoint>, Vec<f64>, Vec<Option<RunOutcome>>) =
        match (&exp.design, &exp.target) {
            (Design::OneArm { scenario }, Target::SusceptibleAndEta { estimator }) => {
                scenario.validate()?;
                let times = exp.grid.times(&scenario.latency);
                let mut truths: Vec<f64> = times
                    .iter()
                    .map(|&t| scenario.latency.survival(t))
                    .collect();
                truths.push(scenario.eta);
                let mut points: Vec<RowPoint> = times.iter().map(|&t| RowPoint::Time(t)).collect();
                points.push(RowPoint::Cure);
                let outcomes = (0..exp.runs)
                    .into_par_iter()
                    .map(|k| {
                        one_arm_run(scenario, estimator, &times, exp.replicates, exp.seed, k).ok()
                    })
                    .collect();
                (points, truths, outcomes)
            }
            (Design::TwoArm { arm0, arm1 }, Target::TauA) => {
                arm0.validate()?;
                arm1.validate()?;
                let times = exp.grid.times(&arm0.latency);
                let truths = times
                    .iter()
                    .map(|&t| {
                        true_tau_quadrature(
                            &arm0.latency,
                            &arm1.latency,
                            arm0.eta,
                            arm1.eta,
                            t,
                            TauKind::Susceptible,
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let points = times.iter().map(|&t| RowPoint::Time(t)).collect();
                let outcomes = (0..exp.runs)
                    .into_par_iter()
                    .map(|k| two_arm_run(arm0, arm1, &times, exp.replicates, exp.seed, k).ok())
                    .collect();
                (points, truths, outcomes)
            }
            (Design::OneArm { .. }, Target::TauA) => {
                return Err(SimError::DesignMismatch {
                    expected: "two-arm",
                })
            }
            (Design::TwoArm { .. }, Target::SusceptibleAndEta { .. }) => {
                return Err(SimError::DesignMismatch {
                    expected: "one-arm",
                })
            }
        };

    let failed_runs: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(k, o)| o.is_none().then_some(k))
        .collect();
    let ok: Vec<&RunOutcome> = outcomes.iter().flatten().collect();
    if ok.is_empty() {
        return Err(SimError::AllRunsFailed(exp.runs));
    }
    let z = normal_quantile(0.5 * (1.0 + exp.level));
    let m = ok.len() as f64;
    let rows = points
        .iter()
        .zip(&truths)
        .enumerate()
        .map(|(k, (&t, &truth))| {
            let est: Vec<f64> = ok.iter().map(|o| o.estimates[k]).collect();
            let sds: Vec<f64> = ok.iter().map(|o| o.sds[k]).collect();
            let covered = est
                .iter()
                .zip(&sds)
                .filter(|(&e, &s)| (e - truth).abs() <= z * s)
                .count();
            ExperimentRow {
                t,
                truth,
                avg_bias: compensated_sum(est.iter().map(|e| e - truth)) / m,
                sd_boot: compensated_sum(sds.iter().copied()) / m,
                sd_emp: sample_sd(&est),
                coverage: covered as f64 / m,
                ci_len: 2.0 * z * compensated_sum(sds.iter().copied()) / m,
                runs: ok.len(),
                replicates: exp.replicates,
            }
        })
        .collect();
    Ok(ExperimentReport {
        rows,
        runs_requested: exp.runs,
        failed_runs,
        outcomes,
    })
}

/// A named experiment setup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub design: Design,
    pub target: Target,
    pub grid: GridSpec,
}

impl Preset {
    pub fn experiment(&self, runs: usize, replicates: usize, seed: u64) -> Experiment {
        Experiment {
            design: self.design.clone(),
            target: self.target.clone(),
            grid: self.grid.clone(),
            runs,
            replicates,
            seed,
            level: default_level(),
        }
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "table1-eta02",
    "table1-eta04",
    "table2-eta02",
    "table2-eta04",
    "table3-eta02",
    "table3-eta04",
    "table4-eta02",
    "table4-eta02-04",
    "tableS1-eta02",
    "tableS1-eta04",
    "tableS2-eta02",
    "tableS2-eta04",
    "tableS3-eta02",
    "tableS3-eta04",
    "tableS4-eta02",
    "tableS4-eta04",
    "no-cure",
    "no-cure-two-arm",
    "fig1-synthetic",
];

fn sc(latency: DistributionSpec, eta: f64, c_max: f64, n: usize) -> Scenario {
    Scenario {
        latency,
        eta,
        c_max,
        n,
    }
}

fn tenths() -> GridSpec {
    GridSpec::Times((1..=10).map(|k| f64::from(k) / 10.0).collect())
}

/// Look up a named preset.
pub fn preset(name: &str) -> Result<Preset, SimError> {
    let beta13 = DistributionSpec::beta(1.0, 3.0);
    let beta14 = DistributionSpec::beta(1.0, 4.0);
    let beta12 = DistributionSpec::beta(1.0, 2.0);
    let beta_cross = DistributionSpec::beta(0.5, 1.5);
    let weibull = DistributionSpec::truncated_weibull(0.75, 1.5, 4.0);
    let one = |description, scenario, estimator| Preset {
        name: PRESET_NAMES
            .iter()
            .find(|&&n| n == name)
            .copied()
            .unwrap_or("custom"),
        description,
        design: Design::OneArm { scenario },
        target: Target::SusceptibleAndEta { estimator },
        grid: GridSpec::default_levels(),
    };
    let two = |description, arm0, arm1, grid| Preset {
        name: PRESET_NAMES
            .iter()
            .find(|&&n| n == name)
            .copied()
            .unwrap_or("custom"),
        description,
        design: Design::TwoArm { arm0, arm1 },
        target: Target::TauA,
        grid,
    };
    let tail = CureEstimator::Tail;
    Ok(match name {
        "table1-eta02" => one("Beta(1,3), eta=0.2, C~U(0,1), n=200", sc(beta13, 0.2, 1.0, 200), tail),
        "table1-eta04" => one("Beta(1,3), eta=0.4, C~U(0,1), n=200", sc(beta13, 0.4, 1.0, 200), tail),
        "table2-eta02" => one(
            "Beta(1,3), eta=0.2, C~U(0,0.8), n=200, extrapolated cure rate",
            sc(beta13, 0.2, 0.8, 200),
            CureEstimator::select_b_default(),
        ),
        "table2-eta04" => one(
            "Beta(1,3), eta=0.4, C~U(0,0.8), n=200, extrapolated cure rate",
            sc(beta13, 0.4, 0.8, 200),
            CureEstimator::select_b_default(),
        ),
        "table3-eta02" => two(
            "arm 0 Beta(1,4), arm 1 Beta(1,2), eta0=eta1=0.2, C~U(0,1), n=200/arm",
            sc(beta14, 0.2, 1.0, 200),
            sc(beta12, 0.2, 1.0, 200),
            tenths(),
        ),
        "table3-eta04" => two(
            "arm 0 Beta(1,4), arm 1 Beta(1,2), eta0=eta1=0.4, C~U(0,1), n=200/arm",
            sc(beta14, 0.4, 1.0, 200),
            sc(beta12, 0.4, 1.0, 200),
            tenths(),
        ),
        "table4-eta02" => two(
            "arm 0 Beta(1,4), arm 1 Beta(0.5,1.5), eta0=eta1=0.2, C~U(0,1), n=200/arm",
            sc(beta14, 0.2, 1.0, 200),
            sc(beta_cross, 0.2, 1.0, 200),
            tenths(),
        ),
        "table4-eta02-04" => two(
            "arm 0 Beta(1,4), arm 1 Beta(0.5,1.5), eta0=0.2, eta1=0.4, C~U(0,1), n=200/arm",
            sc(beta14, 0.2, 1.0, 200),
            sc(beta_cross, 0.4, 1.0, 200),
            tenths(),
        ),
        "tableS1-eta02" => one("truncated Weibull(0.75, 1.5, t_b=4), eta=0.2, C~U(0,5), n=200", sc(weibull, 0.2, 5.0, 200), tail),
        "tableS1-eta04" => one("truncated Weibull(0.75, 1.5, t_b=4), eta=0.4, C~U(0,5), n=200", sc(weibull, 0.4, 5.0, 200), tail),
        "tableS2-eta02" => one("truncated Weibull(0.75, 1.5, t_b=4), eta=0.2, C~U(0,4), n=200", sc(weibull, 0.2, 4.0, 200), tail),
        "tableS2-eta04" => one("truncated Weibull(0.75, 1.5, t_b=4), eta=0.4, C~U(0,4), n=200", sc(weibull, 0.4, 4.0, 200), tail),
        "tableS3-eta02" => one("Beta(1,3), eta=0.2, C~U(0,1), n=400", sc(beta13, 0.2, 1.0, 400), tail),
        "tableS3-eta04" => one("Beta(1,3), eta=0.4, C~U(0,1), n=400", sc(beta13, 0.4, 1.0, 400), tail),
        "tableS4-eta02" => two(
            "arm 0 Beta(1,4), arm 1 Beta(1,3), eta0=eta1=0.2, C~U(0,1), n=200/arm",
            sc(beta14, 0.2, 1.0, 200),
            sc(beta13, 0.2, 1.0, 200),
            tenths(),
        ),
        "tableS4-eta04" => two(
            "arm 0 Beta(1,4), arm 1 Beta(1,3), eta0=eta1=0.4, C~U(0,1), n=200/arm",
            sc(beta14, 0.4, 1.0, 200),
            sc(beta13, 0.4, 1.0, 200),
            tenths(),
        ),
        "no-cure" => one("Beta(1,4), eta=0, C~U(0,1), n=200", sc(beta14, 0.0, 1.0, 200), tail),
        "no-cure-two-arm" => two(
            "arm 0 Beta(1,4) with eta0=0, arm 1 Beta(1,2) with eta1=0.2, C~U(0,1), n=200/arm",
            sc(beta14, 0.0, 1.0, 200),
            sc(beta12, 0.2, 1.0, 200),
            tenths(),
        ),
        "fig1-synthetic" => two(
            "months scale: arm 0 truncated Weibull(0.9, 10, 48) eta0=0.27, arm 1 truncated Weibull(0.8, 14, 48) eta1=0.52, C~U(0,60), n=300/arm",
            sc(DistributionSpec::truncated_weibull(0.9, 10.0, 48.0), 0.27, 60.0, 300),
            sc(DistributionSpec::truncated_weibull(0.8, 14.0, 48.0), 0.52, 60.0, 300),
            GridSpec::Times((1..=8).map(|k| f64::from(6 * k)).collect()),
        ),
        other => return Err(SimError::UnknownPreset(other.to_string())),
    })
}
