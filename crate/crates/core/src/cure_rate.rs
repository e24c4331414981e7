//! Cure-fraction estimators.
//!
//! Under sufficient follow-up the cure fraction is the plateau of the
//! Kaplan-Meier curve at the largest event time `t_K`. Under insufficient
//! follow-up the plateau is corrected by a geometric tail extrapolation over
//! the window `[b^2 t_K, t_K]`:
//!
//! ```text
//! ratio   = (S(b t_K) - S(b^2 t_K)) / (S(t_K) - S(b t_K))    (> 1)
//! eta_b   = S(t_K) - (S(b t_K) - S(t_K)) / (ratio - 1)
//! ```

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::km::{km_fit, KmTarget, StepFunction};
use crate::rng;
use crate::sample_io::Sample;
use crate::sum::compensated_sum;

#[derive(Debug, Error, PartialEq)]
pub enum CureError {
    #[error("no events: cure-rate estimator undefined")]
    NoEvents,
    #[error("scale factor b={0} must lie in (0, 1)")]
    BadScale(f64),
    #[error("degenerate extrapolation window at b={b}: {reason}")]
    DegenerateWindow { b: f64, reason: &'static str },
    #[error("empty b grid")]
    EmptyGrid,
    #[error("at least one bootstrap replicate required")]
    NoReplicates,
    #[error("b selection failed: every grid point is degenerate on the original sample")]
    SelectionFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CureMethod {
    /// KM plateau `S_hat(t_K)`.
    Tail,
    /// Tail-extrapolated estimate with scale `b` and observed ratio `b_gamma`.
    Extrapolated { b: f64, b_gamma: f64 },
    /// Supplied by the caller (known value, or a what-if analysis).
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CureRateEstimate {
    /// Estimate clamped into `[0, 1]`.
    pub value: f64,
    /// Estimate before clamping.
    pub raw_value: f64,
    pub method: CureMethod,
}

impl CureRateEstimate {
    pub fn fixed(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            raw_value: value,
            method: CureMethod::Fixed,
        }
    }

    pub fn is_tail(&self) -> bool {
        matches!(self.method, CureMethod::Tail)
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.raw_value
    }

    pub fn b(&self) -> Option<f64> {
        match self.method {
            CureMethod::Extrapolated { b, .. } => Some(b),
            _ => None,
        }
    }
}

/// `S_hat(t_K)` from the event KM curve (whose jumps are the event times).
pub fn eta_tail(event_curve: &StepFunction) -> Result<CureRateEstimate, CureError> {
    let t_k = event_curve.last_jump().ok_or(CureError::NoEvents)?;
    let value = event_curve.at(t_k);
    Ok(CureRateEstimate {
        value,
        raw_value: value,
        method: CureMethod::Tail,
    })
}

/// Tail estimate straight from a sample.
pub fn eta_tail_sample(sample: &Sample) -> Result<CureRateEstimate, CureError> {
    eta_tail(&km_fit(sample, KmTarget::Event))
}

/// Extrapolated estimate for scale `b` at largest event time `t_k`.
pub fn eta_extrapolated(
    event_curve: &StepFunction,
    b: f64,
    t_k: f64,
) -> Result<CureRateEstimate, CureError> {
    if !(b > 0.0 && b < 1.0) {
        return Err(CureError::BadScale(b));
    }
    let s_k = event_curve.at(t_k);
    let s_b = event_curve.at(b * t_k);
    let s_bb = event_curve.at(b * b * t_k);
    let inner = s_k - s_b;
    if inner == 0.0 {
        return Err(CureError::DegenerateWindow {
            b,
            reason: "flat tail window",
        });
    }
    let b_gamma = (s_b - s_bb) / inner;
    // the ratio estimates b^gamma for a negative extreme-value index; at or
    // below one the geometric extrapolation does not converge
    if b_gamma <= 1.0 {
        return Err(CureError::DegenerateWindow {
            b,
            reason: "tail ratio not above one",
        });
    }
    let raw = s_k - (s_b - s_k) / (b_gamma - 1.0);
    if !raw.is_finite() || !b_gamma.is_finite() {
        return Err(CureError::DegenerateWindow {
            b,
            reason: "non-finite tail ratio",
        });
    }
    Ok(CureRateEstimate {
        value: raw.clamp(0.0, 1.0),
        raw_value: raw,
        method: CureMethod::Extrapolated { b, b_gamma },
    })
}

/// Extrapolated estimate from a sample, using its own `t_K`.
pub fn eta_extrapolated_sample(sample: &Sample, b: f64) -> Result<CureRateEstimate, CureError> {
    let curve = km_fit(sample, KmTarget::Event);
    let t_k = curve.last_jump().ok_or(CureError::NoEvents)?;
    eta_extrapolated(&curve, b, t_k)
}

/// Extrapolated estimate, or the tail estimate when the window is degenerate.
pub fn eta_extrapolated_or_tail(sample: &Sample, b: f64) -> Result<CureRateEstimate, CureError> {
    let curve = km_fit(sample, KmTarget::Event);
    let t_k = curve.last_jump().ok_or(CureError::NoEvents)?;
    curve_extrapolated_or_tail(&curve, b, t_k)
}

fn curve_extrapolated_or_tail(
    curve: &StepFunction,
    b: f64,
    t_k: f64,
) -> Result<CureRateEstimate, CureError> {
    match eta_extrapolated(curve, b, t_k) {
        Err(CureError::DegenerateWindow { .. }) => eta_tail(curve),
        other => other,
    }
}

/// `{0.10, 0.15, ..., 0.90}`.
pub fn default_b_grid() -> Vec<f64> {
    (0..17).map(|k| (10 + 5 * k) as f64 / 100.0).collect()
}

pub const DEFAULT_B_REPLICATES: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BDiagnostic {
    pub b: f64,
    /// Estimate on the original sample (tail value where the window is
    /// degenerate).
    pub eta: Option<f64>,
    /// Mean over the replicates with at least one event.
    pub boot_mean: Option<f64>,
    /// `|eta - boot_mean|`.
    pub criterion: Option<f64>,
    /// Replicates where the estimate was defined.
    pub boot_valid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BSelection {
    pub b_star: f64,
    pub estimate: CureRateEstimate,
    /// One entry per grid point, sorted by `b`.
    pub diagnostics: Vec<BDiagnostic>,
}

/// Choose `b` so that the extrapolated estimate on the original sample best
/// matches its bootstrap average. Wherever the window is degenerate (on the
/// original or on a resample) the tail estimate stands in, so `estimate` may
/// come back with the tail method. All grid points share the same resamples;
/// replicate `r` draws from stream `(seed, r)`. Exact criterion ties go to
/// the larger `b`.
pub fn select_b(
    sample: &Sample,
    grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<BSelection, CureError> {
    if grid.is_empty() {
        return Err(CureError::EmptyGrid);
    }
    if replicates == 0 {
        return Err(CureError::NoReplicates);
    }
    if let Some(&b) = grid.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
        return Err(CureError::BadScale(b));
    }
    let mut grid: Vec<f64> = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let curve = km_fit(sample, KmTarget::Event);
    let t_k = curve.last_jump().ok_or(CureError::NoEvents)?;
    let original: Vec<Option<CureRateEstimate>> = grid
        .iter()
        .map(|&b| curve_extrapolated_or_tail(&curve, b, t_k).ok())
        .collect();

    // per replicate: one value per grid point
    let boot: Vec<Vec<Option<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(seed, r as u64);
            let resample = sample.resample(&mut rng);
            let c = km_fit(&resample, KmTarget::Event);
            match c.last_jump() {
                None => vec![None; grid.len()],
                Some(tk) => grid
                    .iter()
                    .map(|&b| curve_extrapolated_or_tail(&c, b, tk).ok().map(|e| e.value))
                    .collect(),
            }
        })
        .collect();

    let mut diagnostics = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    for (g, &b) in grid.iter().enumerate() {
        let vals: Vec<f64> = boot.iter().filter_map(|row| row[g]).collect();
        let boot_mean =
            (!vals.is_empty()).then(|| compensated_sum(vals.iter().copied()) / vals.len() as f64);
        let eta = original[g].map(|e| e.value);
        let criterion = match (eta, boot_mean) {
            (Some(e), Some(m)) => Some((e - m).abs()),
            _ => None,
        };
        if let Some(c) = criterion {
            // grid is ascending, so `<=` keeps the larger b on exact ties
            if best.is_none_or(|(_, bc)| c <= bc) {
                best = Some((g, c));
            }
        }
        diagnostics.push(BDiagnostic {
            b,
            eta,
            boot_mean,
            criterion,
            boot_valid: vals.len(),
        });
    }
    let (g, _) = best.ok_or(CureError::SelectionFailed)?;
    Ok(BSelection {
        b_star: grid[g],
        estimate: original[g].expect("criterion implies a defined estimate"),
        diagnostics,
    })
}
