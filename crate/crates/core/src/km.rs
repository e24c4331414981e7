//! Product-limit estimation and the censoring-adjusted risk table.
//!
//! Tie convention: when events and censorings share a time `u`, both use the
//! risk set `#{X >= u}`; events are removed before censorings, so the event
//! curve treats same-time censorings as still at risk and the censoring curve
//! treats same-time events as still at risk.

use serde::Serialize;
use thiserror::Error;

use crate::sample_io::Sample;
use crate::sum::NeumaierSum;

#[derive(Debug, Error, PartialEq)]
pub enum KmError {
    #[error("sample has no events")]
    NoEvents,
    #[error("empty sample")]
    EmptySample,
    #[error("censoring survival is zero just before event time t={time}; IPCW weight undefined")]
    DegenerateWeight { time: f64 },
    #[error("jump times must be finite, non-negative and strictly increasing")]
    BadJumps,
}

/// Which side of a jump to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `f(t)`, right-continuous value.
    Right,
    /// `f(t-)`, limit from the left.
    Left,
}

/// Right-continuous piecewise-constant function on `[0, inf)`.
///
/// `values[k]` holds on `[jump_times[k], jump_times[k + 1])`; `initial`
/// holds on `[0, jump_times[0])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    initial: f64,
    jump_times: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(initial: f64, jump_times: Vec<f64>, values: Vec<f64>) -> Result<Self, KmError> {
        let ordered = jump_times.windows(2).all(|w| w[0] < w[1]);
        let finite = jump_times.iter().all(|t| t.is_finite() && *t >= 0.0);
        if jump_times.len() != values.len() || !ordered || !finite {
            return Err(KmError::BadJumps);
        }
        Ok(Self {
            initial,
            jump_times,
            values,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            jump_times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn last_jump(&self) -> Option<f64> {
        self.jump_times.last().copied()
    }

    pub fn last_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial)
    }

    pub fn eval(&self, t: f64, side: Side) -> f64 {
        let k = match side {
            Side::Right => self.jump_times.partition_point(|&x| x <= t),
            Side::Left => self.jump_times.partition_point(|&x| x < t),
        };
        if k == 0 {
            self.initial
        } else {
            self.values[k - 1]
        }
    }

    /// `f(t)`.
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        self.eval(t, Side::Right)
    }

    /// `f(t-)`.
    #[inline]
    pub fn left(&self, t: f64) -> f64 {
        self.eval(t, Side::Left)
    }

    /// Apply `f` to the initial value and every step value.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepFunction {
        StepFunction {
            initial: f(self.initial),
            jump_times: self.jump_times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Breakpoints `0, jump_1, ..., jump_K` paired with the value holding from
    /// each breakpoint on.
    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        std::iter::once((0.0, self.initial)).chain(
            self.jump_times
                .iter()
                .copied()
                .zip(self.values.iter().copied()),
        )
    }

    /// Max absolute difference over the union of both functions' breakpoints.
    pub fn sup_distance(&self, other: &StepFunction) -> f64 {
        let mut worst = (self.initial - other.initial).abs();
        for &t in self.jump_times.iter().chain(other.jump_times.iter()) {
            worst = worst.max((self.at(t) - other.at(t)).abs());
        }
        worst
    }
}

/// Which distribution a product-limit fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmTarget {
    /// Event time `T`: jumps at observed events.
    Event,
    /// Censoring time `C`: jumps at observed censorings.
    Censoring,
}

/// Counts at one distinct observed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TimeTally {
    pub time: f64,
    pub events: usize,
    pub censored: usize,
    /// `#{X >= time}`.
    pub at_risk: usize,
}

pub(crate) fn tally(sample: &Sample) -> Vec<TimeTally> {
    let mut obs: Vec<(f64, bool)> = sample
        .subjects()
        .iter()
        .map(|s| (s.time, s.event))
        .collect();
    obs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = obs.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let time = obs[i].0;
        let mut j = i;
        let mut events = 0;
        while j < n && obs[j].0 == time {
            events += usize::from(obs[j].1);
            j += 1;
        }
        out.push(TimeTally {
            time,
            events,
            censored: (j - i) - events,
            at_risk: n - i,
        });
        i = j;
    }
    out
}

pub(crate) fn product_limit(tallies: &[TimeTally], target: KmTarget) -> StepFunction {
    let mut surv = 1.0;
    let mut jump_times = Vec::new();
    let mut values = Vec::new();
    for t in tallies {
        let d = match target {
            KmTarget::Event => t.events,
            KmTarget::Censoring => t.censored,
        };
        if d == 0 {
            continue;
        }
        surv *= 1.0 - d as f64 / t.at_risk as f64;
        jump_times.push(t.time);
        values.push(surv);
    }
    StepFunction {
        initial: 1.0,
        jump_times,
        values,
    }
}

/// Kaplan-Meier curve of the event (`S`) or censoring (`G`) distribution.
pub fn km_fit(sample: &Sample, target: KmTarget) -> StepFunction {
    product_limit(&tally(sample), target)
}

/// Both curves from one sort: `(S_hat, G_hat)`.
pub fn km_fit_both(sample: &Sample) -> (StepFunction, StepFunction) {
    let tallies = tally(sample);
    (
        product_limit(&tallies, KmTarget::Event),
        product_limit(&tallies, KmTarget::Censoring),
    )
}

/// `f(t)` or `f(t-)`.
pub fn step_eval(f: &StepFunction, t: f64, side: Side) -> f64 {
    f.eval(t, side)
}

/// One row per distinct event time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskRow {
    pub time: f64,
    /// Events at `time`.
    pub events: usize,
    /// `#{X >= time}`.
    pub at_risk: usize,
    /// `G_hat(time-)`.
    pub g_left: f64,
    /// `events / g_left`.
    pub d_tilde: f64,
    /// `sum_{j >= k} d_tilde_j`.
    pub y_tilde: f64,
}

/// Censoring-adjusted risk table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskTable {
    pub rows: Vec<RiskRow>,
    pub n: usize,
    /// Estimated susceptible size `y_tilde` of the first row.
    pub n_a_hat: f64,
}

impl RiskTable {
    pub fn last_event_time(&self) -> Option<f64> {
        self.rows.last().map(|r| r.time)
    }

    /// IPCW reconstruction of the event distribution function,
    /// `F_hat(t) = (1/n) sum_{t_k <= t} d_tilde_k`.
    pub fn ipcw_cdf(&self) -> StepFunction {
        let n = self.n as f64;
        let mut acc = NeumaierSum::new();
        let mut values = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            acc.add(r.d_tilde);
            values.push(acc.value() / n);
        }
        StepFunction {
            initial: 0.0,
            jump_times: self.rows.iter().map(|r| r.time).collect(),
            values,
        }
    }
}

/// Distinct event times with raw and IPCW-adjusted counts.
pub fn risk_table(sample: &Sample) -> Result<RiskTable, KmError> {
    let tallies = tally(sample);
    let g = product_limit(&tallies, KmTarget::Censoring);
    risk_table_with(&tallies, &g, sample.len())
}

pub(crate) fn risk_table_with(
    tallies: &[TimeTally],
    g: &StepFunction,
    n: usize,
) -> Result<RiskTable, KmError> {
    if n == 0 {
        return Err(KmError::EmptySample);
    }
    let mut rows = Vec::new();
    for t in tallies.iter().filter(|t| t.events > 0) {
        let g_left = g.left(t.time);
        if g_left <= 0.0 {
            return Err(KmError::DegenerateWeight { time: t.time });
        }
        rows.push(RiskRow {
            time: t.time,
            events: t.events,
            at_risk: t.at_risk,
            g_left,
            d_tilde: t.events as f64 / g_left,
            y_tilde: 0.0,
        });
    }
    if rows.is_empty() {
        return Err(KmError::NoEvents);
    }
    let mut acc = NeumaierSum::new();
    for r in rows.iter_mut().rev() {
        acc.add(r.d_tilde);
        r.y_tilde = acc.value();
    }
    let n_a_hat = rows[0].y_tilde;
    Ok(RiskTable { rows, n, n_a_hat })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn d1() -> Sample {
        Sample::from_pairs([
            (1.0, true),
            (2.0, false),
            (3.0, true),
            (4.0, false),
            (5.0, false),
        ])
    }

    const EPS: f64 = 1e-12;

    #[test]
    fn d1_event_curve() {
        let s = km_fit(&d1(), KmTarget::Event);
        assert_eq!(s.jump_times(), &[1.0, 3.0]);
        assert_eq!(s.at(0.5), 1.0);
        assert!((s.at(1.0) - 0.8).abs() < EPS);
        assert!((s.at(2.9) - 0.8).abs() < EPS);
        assert!((s.at(3.0) - 8.0 / 15.0).abs() < EPS);
        assert!((s.at(100.0) - 8.0 / 15.0).abs() < EPS);
    }

    #[test]
    fn d1_censoring_curve() {
        let g = km_fit(&d1(), KmTarget::Censoring);
        assert_eq!(g.jump_times(), &[2.0, 4.0, 5.0]);
        assert_eq!(g.at(1.9), 1.0);
        assert!((g.at(2.0) - 0.75).abs() < EPS);
        assert!((g.at(4.0) - 0.375).abs() < EPS);
        assert_eq!(g.at(5.0), 0.0);
    }

    #[test]
    fn uncensored_is_empirical() {
        let s = km_fit(
            &Sample::from_pairs([(1.0, true), (2.0, true), (3.0, true)]),
            KmTarget::Event,
        );
        assert!((s.at(1.0) - 2.0 / 3.0).abs() < EPS);
        assert!((s.at(2.0) - 1.0 / 3.0).abs() < EPS);
        assert_eq!(s.at(3.0), 0.0);
    }

    #[test]
    fn step_eval_sides() {
        let s = km_fit(&d1(), KmTarget::Event);
        assert!((step_eval(&s, 2.0, Side::Right) - 0.8).abs() < EPS);
        assert_eq!(step_eval(&s, 1.0, Side::Left), 1.0);
        let last = s.last_value();
        assert_eq!(step_eval(&s, 10.0, Side::Left), last);
        assert_eq!(step_eval(&s, 10.0, Side::Right), last);
        // constant between jumps
        assert_eq!(s.at(1.5), s.at(1.5 + 1e-9));
    }

    #[test]
    fn d1_risk_table() {
        let rt = risk_table(&d1()).unwrap();
        assert_eq!(rt.rows.len(), 2);
        let (r1, r2) = (rt.rows[0], rt.rows[1]);
        assert_eq!((r1.time, r1.events, r1.at_risk), (1.0, 1, 5));
        assert!((r1.d_tilde - 1.0).abs() < EPS);
        assert!((r1.y_tilde - 7.0 / 3.0).abs() < EPS);
        assert_eq!((r2.time, r2.events, r2.at_risk), (3.0, 1, 3));
        assert!((r2.g_left - 0.75).abs() < EPS);
        assert!((r2.d_tilde - 4.0 / 3.0).abs() < EPS);
        assert!((r2.y_tilde - 4.0 / 3.0).abs() < EPS);
        assert!((rt.n_a_hat - 7.0 / 3.0).abs() < EPS);
        let eta = km_fit(&d1(), KmTarget::Event).last_value();
        assert!((rt.n_a_hat - 5.0 * (1.0 - eta)).abs() < EPS);
    }

    #[test]
    fn risk_table_without_censoring() {
        let s = Sample::from_pairs([(1.0, true), (2.0, true), (2.0, true), (4.0, true)]);
        let rt = risk_table(&s).unwrap();
        for r in &rt.rows {
            assert_eq!(r.d_tilde, r.events as f64);
            assert_eq!(r.y_tilde, r.at_risk as f64);
        }
    }

    #[test]
    fn last_event_row_telescopes() {
        let s = Sample::from_pairs([(1.0, true), (2.0, false), (3.0, true)]);
        let rt = risk_table(&s).unwrap();
        let last = rt.rows.last().unwrap();
        assert_eq!(last.y_tilde, last.d_tilde);
    }

    #[test]
    fn risk_table_errors() {
        assert_eq!(
            risk_table(&Sample::from_pairs([(1.0, false)])),
            Err(KmError::NoEvents)
        );
        assert_eq!(risk_table(&Sample::default()), Err(KmError::EmptySample));
    }

    #[test]
    fn step_function_rejects_unordered_jumps() {
        assert!(StepFunction::new(1.0, vec![2.0, 1.0], vec![0.5, 0.2]).is_err());
        assert!(StepFunction::new(1.0, vec![1.0], vec![]).is_err());
    }
}
