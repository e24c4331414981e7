//! Susceptible (latency) survival estimation.
//!
//! The canonical estimate is the location-scale transform of the KM curve,
//! `(S_hat(t) - eta) / (1 - eta)`. With the tail cure-rate estimate it
//! coincides with an IPCW form `y_tilde_{k+1} / n_a_hat` and with a
//! product-limit form `prod (1 - d_tilde_k / y_tilde_k)`; both are computed
//! as cross-checks and their disagreement is recorded.

use serde::Serialize;
use thiserror::Error;

use crate::cure_rate::CureRateEstimate;
use crate::km::{risk_table_with, tally, KmError, KmTarget, RiskTable, StepFunction, TimeTally};
use crate::sample_io::Sample;
use crate::sum::NeumaierSum;

#[derive(Debug, Error, PartialEq)]
pub enum SusceptibleError {
    #[error("cure fraction {0} leaves no susceptible mass")]
    DegenerateMixture(f64),
    #[error("sample has no events")]
    NoEvents,
    #[error(transparent)]
    Km(#[from] KmError),
    #[error("t={0} lies beyond the largest observation")]
    Domain(f64),
    #[error("self-consistency terms undefined at t={0}")]
    Evaluation(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SusceptibleCurve {
    /// Location-scale estimate, clamped into `[0, 1]`.
    pub curve: StepFunction,
    pub eta_used: CureRateEstimate,
    /// Max disagreement among the three forms; only computed for the tail
    /// estimate, where the forms are algebraically equal.
    pub form_divergence: Option<f64>,
    /// Whether any value was clamped into `[0, 1]`.
    pub clamped: bool,
}

/// Location-scale transform of an event curve.
pub fn location_scale(event_curve: &StepFunction, eta: f64) -> (StepFunction, bool) {
    let scale = 1.0 - eta;
    let clamped = event_curve
        .knots()
        .any(|(_, v)| !(0.0..=1.0).contains(&((v - eta) / scale)));
    let curve = event_curve.map_values(|v| ((v - eta) / scale).clamp(0.0, 1.0));
    (curve, clamped)
}

/// IPCW form `sum_{t_k > t} d_tilde_k / n_a_hat`.
pub fn ipcw_form(table: &RiskTable) -> StepFunction {
    let n_a = table.n_a_hat;
    let values = table
        .rows
        .iter()
        .enumerate()
        .map(|(k, _)| table.rows.get(k + 1).map_or(0.0, |next| next.y_tilde / n_a))
        .collect();
    StepFunction::new(1.0, table.rows.iter().map(|r| r.time).collect(), values)
        .expect("risk table times are increasing")
}

/// Adjusted product-limit form `prod_{t_k <= t} (1 - d_tilde_k / y_tilde_k)`.
pub fn product_limit_form(table: &RiskTable) -> StepFunction {
    let mut surv = 1.0;
    let values = table
        .rows
        .iter()
        .map(|r| {
            surv *= 1.0 - r.d_tilde / r.y_tilde;
            surv
        })
        .collect();
    StepFunction::new(1.0, table.rows.iter().map(|r| r.time).collect(), values)
        .expect("risk table times are increasing")
}

/// Susceptible survival curve for a given cure-rate estimate.
pub fn susceptible_curve(
    sample: &Sample,
    eta: &CureRateEstimate,
) -> Result<SusceptibleCurve, SusceptibleError> {
    let tallies = tally(sample);
    susceptible_from_tallies(&tallies, sample.len(), eta)
}

pub(crate) fn susceptible_from_tallies(
    tallies: &[TimeTally],
    n: usize,
    eta: &CureRateEstimate,
) -> Result<SusceptibleCurve, SusceptibleError> {
    if eta.value >= 1.0 {
        return Err(SusceptibleError::DegenerateMixture(eta.value));
    }
    if tallies.iter().all(|t| t.events == 0) {
        return Err(SusceptibleError::NoEvents);
    }
    let event_curve = crate::km::product_limit(tallies, KmTarget::Event);
    let (curve, clamped) = location_scale(&event_curve, eta.value);

    let form_divergence = if eta.is_tail() {
        let g = crate::km::product_limit(tallies, KmTarget::Censoring);
        let table = risk_table_with(tallies, &g, n)?;
        let w = ipcw_form(&table);
        let pl = product_limit_form(&table);
        Some(curve.sup_distance(&w).max(curve.sup_distance(&pl)))
    } else {
        None
    };

    Ok(SusceptibleCurve {
        curve,
        eta_used: *eta,
        form_divergence,
        clamped,
    })
}

/// Susceptible proportion of the risk set,
/// `phi(t) = 1 - eta G(t-) / (Y(t) / n)`, at the distinct observed times.
///
/// `phi` is left-continuous and constant on `(x_(m-1), x_(m)]`; it is
/// undefined past the largest observation, where the risk set is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiCurve {
    /// Distinct observed times `x_(1) < ... < x_(M)`.
    pub times: Vec<f64>,
    /// `phi(x_(m))`.
    pub values: Vec<f64>,
}

impl PhiCurve {
    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("non-empty phi curve")
    }

    /// `phi(t)` for `0 <= t <= t_max`.
    pub fn value(&self, t: f64) -> Result<f64, SusceptibleError> {
        if t > self.t_max() {
            return Err(SusceptibleError::Domain(t));
        }
        // first observed time >= t
        let m = self.times.partition_point(|&x| x < t);
        Ok(self.values[m])
    }

    /// Right limit `phi(t+)` for `0 <= t < t_max`.
    pub fn right_limit(&self, t: f64) -> Result<f64, SusceptibleError> {
        if t >= self.t_max() {
            return Err(SusceptibleError::Domain(t));
        }
        let m = self.times.partition_point(|&x| x <= t);
        Ok(self.values[m])
    }

    /// Right-continuous step representation of `phi(t+)` on `[0, t_max)`.
    pub fn as_step_function(&self) -> StepFunction {
        let m = self.times.len();
        StepFunction::new(
            self.values[0],
            self.times[..m - 1].to_vec(),
            self.values[1..].to_vec(),
        )
        .expect("observed times are increasing")
    }
}

pub fn phi_hat(sample: &Sample, eta: &CureRateEstimate) -> Result<PhiCurve, SusceptibleError> {
    let tallies = tally(sample);
    if tallies.is_empty() {
        return Err(SusceptibleError::Km(KmError::EmptySample));
    }
    Ok(phi_from_tallies(&tallies, sample.len(), eta.value))
}

fn phi_from_tallies(tallies: &[TimeTally], n: usize, eta: f64) -> PhiCurve {
    let g = crate::km::product_limit(tallies, KmTarget::Censoring);
    let n = n as f64;
    PhiCurve {
        times: tallies.iter().map(|t| t.time).collect(),
        values: tallies
            .iter()
            .map(|t| 1.0 - eta * g.left(t.time) / (t.at_risk as f64 / n))
            .collect(),
    }
}

/// Sub-survival of susceptibles, `H_1a(t) = Y(t+)/n - eta G(t)`.
pub fn h1a_hat(sample: &Sample, eta: &CureRateEstimate) -> StepFunction {
    h1a_from_tallies(&tally(sample), sample.len(), eta.value)
}

fn h1a_from_tallies(tallies: &[TimeTally], n: usize, eta: f64) -> StepFunction {
    let g = crate::km::product_limit(tallies, KmTarget::Censoring);
    let n_f = n as f64;
    let values = tallies
        .iter()
        .map(|t| {
            let beyond = t.at_risk - t.events - t.censored;
            beyond as f64 / n_f - eta * g.at(t.time)
        })
        .collect();
    let initial = if n == 0 { 0.0 } else { 1.0 - eta };
    StepFunction::new(initial, tallies.iter().map(|t| t.time).collect(), values)
        .expect("observed times are increasing")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfConsistencyReport {
    pub max_residual: f64,
    /// Distinct observed times.
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub phi_curve: PhiCurve,
    pub h1a_curve: StepFunction,
}

/// Residual of the cure-adjusted self-consistency equation
///
/// ```text
/// n (1 - eta) S(t) = sum_{X_i <= t, censored} phi(X_i+) S(t) / S(X_i) + n H_1a(t)
/// ```
///
/// at each distinct observed time. Terms with `candidate(t) = 0` contribute 0.
pub fn self_consistency_residual(
    candidate: &StepFunction,
    sample: &Sample,
    eta: &CureRateEstimate,
) -> Result<SelfConsistencyReport, SusceptibleError> {
    let tallies = tally(sample);
    if tallies.is_empty() {
        return Err(SusceptibleError::Km(KmError::EmptySample));
    }
    let n = sample.len();
    let n_f = n as f64;
    let phi = phi_from_tallies(&tallies, n, eta.value);
    let h1a = h1a_from_tallies(&tallies, n, eta.value);
    let t_max = phi.t_max();

    // sum over censored x <= t of count * phi(x+) / S(x); `pending_top`
    // marks censorings at t_max, whose phi(x+) is undefined
    let mut acc = NeumaierSum::new();
    let mut zero_seen = false;
    let mut pending_top = false;
    let mut times = Vec::with_capacity(tallies.len());
    let mut residuals = Vec::with_capacity(tallies.len());
    for t in &tallies {
        let c_t = candidate.at(t.time);
        if t.censored > 0 {
            let c_x = c_t;
            if c_x == 0.0 {
                zero_seen = true;
            } else if t.time >= t_max {
                pending_top = true;
            } else {
                acc.add(t.censored as f64 * phi.right_limit(t.time)? / c_x);
            }
        }
        let censored_term = if c_t == 0.0 {
            0.0
        } else if zero_seen || pending_top {
            return Err(SusceptibleError::Evaluation(t.time));
        } else {
            c_t * acc.value()
        };
        let lhs = n_f * (1.0 - eta.value) * c_t;
        let r = lhs - censored_term - n_f * h1a.at(t.time);
        times.push(t.time);
        residuals.push(r);
    }
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(SelfConsistencyReport {
        max_residual,
        times,
        residuals,
        phi_curve: phi,
        h1a_curve: h1a,
    })
}
