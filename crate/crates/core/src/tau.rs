//! Two-sample tau processes.
//!
//! For arms 0 and 1 the estimator sums, over orderable pairs `(i, j)` with
//! `X~ = min(X0_i, X1_j) <= t`, the sign of `X1_j - X0_i` weighted by
//! `1 / (G0(X~-) G1(X~-))` and, for the susceptible version, by the
//! probability `w_ij` that both members are susceptible.
//!
//! Evaluation avoids the `n0 * n1` pair loop: an arm-0 event at `x` pairs
//! with every arm-1 subject observed after `x`, so its contribution is the
//! suffix sum of arm-1 weights. The explicit pair enumeration is kept in
//! [`pair_terms`] as a cross-check.

use serde::Serialize;
use thiserror::Error;

use crate::cure_rate::CureRateEstimate;
use crate::dist::{DistError, DistributionSpec};
use crate::km::{product_limit, tally, KmTarget, StepFunction};
use crate::quadrature::{integrate, integrate_from_zero, QuadError, DEFAULT_TOL};
use crate::sample_io::{Arm, Sample};
use crate::sum::NeumaierSum;
use crate::susceptible::{susceptible_from_tallies, SusceptibleError};

#[derive(Debug, Error, PartialEq)]
pub enum TauError {
    #[error("arm {0} has no subjects")]
    EmptyArm(Arm),
    #[error("censoring weight vanishes for pair ({i}, {j}) at t={time}")]
    DegenerateWeight { i: usize, j: usize, time: f64 },
    #[error("susceptible weight undefined for censored subject {index} of arm {arm}")]
    WeightUndefined { arm: Arm, index: usize },
    #[error("arm {arm}: {source}")]
    Susceptible {
        arm: Arm,
        #[source]
        source: SusceptibleError,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error("cure fraction {0} must lie in [0, 1)")]
    BadEta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TauKind {
    Overall,
    Susceptible,
}

impl std::fmt::Display for TauKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TauKind::Overall => "tau",
            TauKind::Susceptible => "tau_a",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub sd: Option<Vec<f64>>,
    pub ci_low: Option<Vec<f64>>,
    pub ci_high: Option<Vec<f64>>,
    pub kind: TauKind,
}

/// One `(arm-0, arm-1)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub x_tilde: f64,
    pub orderable: bool,
    /// `sign(X1_j - X0_i)`.
    pub sign: i8,
    pub ipcw: f64,
    pub weight: f64,
}

/// Per-arm quantities shared by the fast and pairwise evaluations.
#[derive(Debug, Clone)]
struct ArmFit {
    time: Vec<f64>,
    event: Vec<bool>,
    g: StepFunction,
    /// Susceptibility weight per subject; `None` where it is 0/0.
    w: Vec<Option<f64>>,
    one_minus_eta: f64,
}

fn fit_arm(sample: &Sample, arm: Arm, eta: Option<&CureRateEstimate>) -> Result<ArmFit, TauError> {
    if sample.is_empty() {
        return Err(TauError::EmptyArm(arm));
    }
    let tallies = tally(sample);
    let g = product_limit(&tallies, KmTarget::Censoring);
    let time: Vec<f64> = sample.subjects().iter().map(|s| s.time).collect();
    let event: Vec<bool> = sample.subjects().iter().map(|s| s.event).collect();
    let (w, one_minus_eta) = match eta {
        None => (vec![Some(1.0); time.len()], 1.0),
        Some(e) => {
            if !(0.0..1.0).contains(&e.value) {
                return Err(TauError::BadEta(e.value));
            }
            let sa = susceptible_from_tallies(&tallies, sample.len(), e)
                .map_err(|source| TauError::Susceptible { arm, source })?
                .curve;
            let q = 1.0 - e.value;
            let w = time
                .iter()
                .zip(&event)
                .map(|(&x, &d)| {
                    if d {
                        return Some(1.0);
                    }
                    let num = q * sa.at(x);
                    let den = num + e.value;
                    (den > 0.0).then(|| num / den)
                })
                .collect();
            (w, q)
        }
    };
    Ok(ArmFit {
        time,
        event,
        g,
        w,
        one_minus_eta,
    })
}

/// Events of `me` at time `x`, each paired with the subjects of `other`
/// observed strictly later. Returns `(time, contribution)` sorted by time.
fn one_sided(
    me: &ArmFit,
    other: &ArmFit,
    other_arm: Arm,
    me_is_zero: bool,
) -> Result<Vec<(f64, f64)>, TauError> {
    let mut order: Vec<usize> = (0..other.time.len()).collect();
    order.sort_by(|&a, &b| other.time[a].total_cmp(&other.time[b]));
    let sorted: Vec<f64> = order.iter().map(|&k| other.time[k]).collect();
    // suffix[k] = sum of weights of sorted[k..]; undefined weights poison
    // only the suffixes that contain them
    let mut suffix = vec![Some(0.0); order.len() + 1];
    let mut acc = NeumaierSum::new();
    let mut bad: Option<usize> = None;
    for k in (0..order.len()).rev() {
        match other.w[order[k]] {
            Some(w) => acc.add(w),
            None => bad = Some(order[k]),
        }
        suffix[k] = if bad.is_some() {
            None
        } else {
            Some(acc.value())
        };
    }

    let mut out = Vec::new();
    for (idx, (&x, &d)) in me.time.iter().zip(&me.event).enumerate() {
        if !d {
            continue;
        }
        let k = sorted.partition_point(|&y| y <= x);
        if k == order.len() {
            continue;
        }
        let Some(wsum) = suffix[k] else {
            let index = order[k..]
                .iter()
                .copied()
                .find(|&j| other.w[j].is_none())
                .expect("undefined weight in suffix");
            return Err(TauError::WeightUndefined {
                arm: other_arm,
                index,
            });
        };
        let (g0, g1) = if me_is_zero {
            (me.g.left(x), other.g.left(x))
        } else {
            (other.g.left(x), me.g.left(x))
        };
        let gg = g0 * g1;
        if gg <= 0.0 {
            let (i, j) = if me_is_zero {
                (idx, order[k])
            } else {
                (order[k], idx)
            };
            return Err(TauError::DegenerateWeight { i, j, time: x });
        }
        out.push((x, wsum / gg));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn cumulative_at(contrib: &[(f64, f64)], grid: &[f64]) -> Vec<f64> {
    let mut acc = NeumaierSum::new();
    let mut k = 0;
    grid.iter()
        .map(|&t| {
            while k < contrib.len() && contrib[k].0 <= t {
                acc.add(contrib[k].1);
                k += 1;
            }
            acc.value()
        })
        .collect()
}

fn evaluate(
    f0: &ArmFit,
    f1: &ArmFit,
    grid: Option<&[f64]>,
    kind: TauKind,
) -> Result<TauCurve, TauError> {
    let plus = one_sided(f0, f1, Arm::One, true)?;
    let minus = one_sided(f1, f0, Arm::Zero, false)?;
    let grid: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => {
            let mut g: Vec<f64> = plus.iter().chain(&minus).map(|c| c.0).collect();
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        }
    };
    let norm =
        (f0.time.len() as f64 * f1.time.len() as f64) * (f0.one_minus_eta * f1.one_minus_eta);
    let a = cumulative_at(&plus, &grid);
    let b = cumulative_at(&minus, &grid);
    let values = a.iter().zip(&b).map(|(p, m)| (p - m) / norm).collect();
    Ok(TauCurve {
        grid,
        values,
        sd: None,
        ci_low: None,
        ci_high: None,
        kind,
    })
}

/// Default evaluation grid: the distinct orderable pair times.
pub fn default_grid(sample0: &Sample, sample1: &Sample) -> Result<Vec<f64>, TauError> {
    Ok(tau_curve(sample0, sample1, None)?.grid)
}

/// Overall tau process `tau_hat(t)`; `grid = None` uses [`default_grid`].
pub fn tau_curve(
    sample0: &Sample,
    sample1: &Sample,
    grid: Option<&[f64]>,
) -> Result<TauCurve, TauError> {
    let f0 = fit_arm(sample0, Arm::Zero, None)?;
    let f1 = fit_arm(sample1, Arm::One, None)?;
    evaluate(&f0, &f1, grid, TauKind::Overall)
}

/// Susceptible tau process `tau_hat_a(t)` for given cure-rate estimates.
pub fn tau_a_curve(
    sample0: &Sample,
    sample1: &Sample,
    eta0: &CureRateEstimate,
    eta1: &CureRateEstimate,
    grid: Option<&[f64]>,
) -> Result<TauCurve, TauError> {
    let f0 = fit_arm(sample0, Arm::Zero, Some(eta0))?;
    let f1 = fit_arm(sample1, Arm::One, Some(eta1))?;
    evaluate(&f0, &f1, grid, TauKind::Susceptible)
}

/// Every `(i, j)` pair with its sign, censoring weight and susceptibility
/// weight. `eta = None` gives the overall version (all weights 1).
pub fn pair_terms(
    sample0: &Sample,
    sample1: &Sample,
    eta: Option<(&CureRateEstimate, &CureRateEstimate)>,
) -> Result<Vec<PairTerm>, TauError> {
    let f0 = fit_arm(sample0, Arm::Zero, eta.map(|e| e.0))?;
    let f1 = fit_arm(sample1, Arm::One, eta.map(|e| e.1))?;
    let mut out = Vec::with_capacity(f0.time.len() * f1.time.len());
    for i in 0..f0.time.len() {
        for j in 0..f1.time.len() {
            let (x0, x1) = (f0.time[i], f1.time[j]);
            let x_tilde = x0.min(x1);
            let orderable = (x0 < x1 && f0.event[i]) || (x0 > x1 && f1.event[j]);
            let sign = if x1 > x0 {
                1
            } else if x1 < x0 {
                -1
            } else {
                0
            };
            let ipcw = 1.0 / (f0.g.left(x_tilde) * f1.g.left(x_tilde));
            let weight = match (f0.w[i], f1.w[j]) {
                (Some(a), Some(b)) => a * b,
                (None, _) => {
                    return Err(TauError::WeightUndefined {
                        arm: Arm::Zero,
                        index: i,
                    })
                }
                (_, None) => {
                    return Err(TauError::WeightUndefined {
                        arm: Arm::One,
                        index: j,
                    })
                }
            };
            out.push(PairTerm {
                i,
                j,
                x_tilde,
                orderable,
                sign,
                ipcw,
                weight,
            });
        }
    }
    Ok(out)
}

/// Direct pair sum at `t` with normaliser `n0 n1 (1 - eta0)(1 - eta1)`.
pub fn tau_from_pairs(terms: &[PairTerm], t: f64, normalizer: f64) -> f64 {
    let s: NeumaierSum = terms
        .iter()
        .filter(|p| p.orderable && p.x_tilde <= t)
        .map(|p| f64::from(p.sign) * p.ipcw * p.weight)
        .collect();
    s.value() / normalizer
}

impl TauCurve {
    /// Step evaluation between grid points: the value at the last grid
    /// point `<= t`, 0 before the first.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.grid.partition_point(|&g| g <= t);
        if k == 0 {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    pub fn negated(&self) -> TauCurve {
        let neg = |v: &Vec<f64>| v.iter().map(|x| -x).collect::<Vec<_>>();
        TauCurve {
            grid: self.grid.clone(),
            values: neg(&self.values),
            sd: self.sd.clone(),
            ci_low: self.ci_high.as_ref().map(neg),
            ci_high: self.ci_low.as_ref().map(neg),
            kind: self.kind,
        }
    }
}

/// `int_0^t S_other dF_me` with `S`, `F` the mixed or latency laws.
fn cross_integral(
    me: &DistributionSpec,
    other: &DistributionSpec,
    eta_me: f64,
    eta_other: f64,
    t: f64,
) -> Result<f64, QuadError> {
    let upper = t.min(me.support_end());
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let integrand = |u: f64| {
        let s = (1.0 - eta_other) * other.survival(u) + eta_other;
        s * (1.0 - eta_me) * me.pdf(u)
    };
    // split at the other law's support end, where S_other has a kink
    let kink = other.support_end();
    if kink < upper {
        Ok(integrate_from_zero(integrand, kink, DEFAULT_TOL / 2.0)?
            + integrate(integrand, kink, upper, DEFAULT_TOL / 2.0)?)
    } else {
        integrate_from_zero(integrand, upper, DEFAULT_TOL)
    }
}

fn check_inputs(
    d0: &DistributionSpec,
    d1: &DistributionSpec,
    eta0: f64,
    eta1: f64,
) -> Result<(), TauError> {
    d0.validate()?;
    d1.validate()?;
    for e in [eta0, eta1] {
        if !(0.0..1.0).contains(&e) {
            return Err(TauError::BadEta(e));
        }
    }
    Ok(())
}

/// Population tau at `t` by numerical integration.
///
/// `Susceptible` returns `int_0^t S_a1 dF_a0 - int_0^t S_a0 dF_a1`; `Overall`
/// uses the mixed survivals `S = (1 - eta) S_a + eta`.
pub fn true_tau_quadrature(
    dist0: &DistributionSpec,
    dist1: &DistributionSpec,
    eta0: f64,
    eta1: f64,
    t: f64,
    kind: TauKind,
) -> Result<f64, TauError> {
    check_inputs(dist0, dist1, eta0, eta1)?;
    let (e0, e1) = match kind {
        TauKind::Susceptible => (0.0, 0.0),
        TauKind::Overall => (eta0, eta1),
    };
    Ok(cross_integral(dist0, dist1, e0, e1, t)? - cross_integral(dist1, dist0, e1, e0, t)?)
}

/// `|tau(t) - [(1-eta0)(1-eta1) tau_a(t) + (1-eta0) eta1 F_a0(t) - (1-eta1) eta0 F_a1(t)]|`
/// with every term computed by quadrature.
pub fn decomposition_residual(
    dist0: &DistributionSpec,
    dist1: &DistributionSpec,
    eta0: f64,
    eta1: f64,
    t: f64,
) -> Result<f64, TauError> {
    let tau = true_tau_quadrature(dist0, dist1, eta0, eta1, t, TauKind::Overall)?;
    let tau_a = true_tau_quadrature(dist0, dist1, eta0, eta1, t, TauKind::Susceptible)?;
    let cdf = |d: &DistributionSpec| {
        integrate_from_zero(|u| d.pdf(u), t.min(d.support_end()), DEFAULT_TOL)
    };
    let f0 = cdf(dist0)?;
    let f1 = cdf(dist1)?;
    let rhs =
        (1.0 - eta0) * (1.0 - eta1) * tau_a + (1.0 - eta0) * eta1 * f0 - (1.0 - eta1) * eta0 * f1;
    Ok((tau - rhs).abs())
}
