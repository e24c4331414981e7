//! Latency distributions used by the simulation presets and the quadrature
//! oracle.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("invalid {family} parameters: {detail}")]
    Parameters {
        family: &'static str,
        detail: String,
    },
}

/// Latency distribution on a bounded support `[0, support_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Beta {
        alpha: f64,
        beta: f64,
    },
    /// Weibull `F_W(t) = 1 - exp(-(t/scale)^shape)` truncated to `[0, t_b]`.
    TruncatedWeibull {
        shape: f64,
        scale: f64,
        t_b: f64,
    },
}

fn weibull_cdf(shape: f64, scale: f64, t: f64) -> f64 {
    -(-(t / scale).powf(shape)).exp_m1()
}

/// Inverse-CDF draw from the truncated Weibull. `u = 1` maps to `t_b`.
pub fn truncated_weibull_sample(shape: f64, scale: f64, t_b: f64, u: f64) -> f64 {
    let mass = weibull_cdf(shape, scale, t_b);
    let t = scale * (-(-u * mass).ln_1p()).powf(1.0 / shape);
    t.clamp(0.0, t_b)
}

impl DistributionSpec {
    pub fn beta(alpha: f64, beta: f64) -> Self {
        DistributionSpec::Beta { alpha, beta }
    }

    pub fn truncated_weibull(shape: f64, scale: f64, t_b: f64) -> Self {
        DistributionSpec::TruncatedWeibull { shape, scale, t_b }
    }

    pub fn validate(&self) -> Result<(), DistError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            DistributionSpec::Beta { alpha, beta } => {
                if positive(alpha) && positive(beta) {
                    Ok(())
                } else {
                    Err(DistError::Parameters {
                        family: "beta",
                        detail: format!("alpha={alpha}, beta={beta}"),
                    })
                }
            }
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                if positive(shape) && positive(scale) && positive(t_b) {
                    Ok(())
                } else {
                    Err(DistError::Parameters {
                        family: "truncated weibull",
                        detail: format!("shape={shape}, scale={scale}, t_b={t_b}"),
                    })
                }
            }
        }
    }

    /// Right endpoint of the support.
    pub fn support_end(&self) -> f64 {
        match *self {
            DistributionSpec::Beta { .. } => 1.0,
            DistributionSpec::TruncatedWeibull { t_b, .. } => t_b,
        }
    }

    fn statrs_beta(alpha: f64, beta: f64) -> statrs::distribution::Beta {
        statrs::distribution::Beta::new(alpha, beta).expect("validated beta parameters")
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.support_end() {
            return 1.0;
        }
        match *self {
            DistributionSpec::Beta { .. } => 1.0 - self.survival(t),
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                weibull_cdf(shape, scale, t) / weibull_cdf(shape, scale, t_b)
            }
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        if t >= self.support_end() {
            return 0.0;
        }
        match *self {
            DistributionSpec::Beta { alpha: 1.0, beta } => (1.0 - t).powf(beta),
            DistributionSpec::Beta { alpha, beta: 1.0 } => 1.0 - t.powf(alpha),
            DistributionSpec::Beta { alpha, beta } => Self::statrs_beta(alpha, beta).sf(t),
            DistributionSpec::TruncatedWeibull { .. } => 1.0 - self.cdf(t),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.support_end() {
            return 0.0;
        }
        match *self {
            DistributionSpec::Beta { alpha, beta } => Self::statrs_beta(alpha, beta).pdf(t),
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                let z = t / scale;
                let f = shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp();
                f / weibull_cdf(shape, scale, t_b)
            }
        }
    }

    /// Time at which the distribution function reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            DistributionSpec::Beta { alpha, beta } => {
                if p <= 0.0 {
                    0.0
                } else if p >= 1.0 {
                    1.0
                } else if alpha == 1.0 {
                    1.0 - (1.0 - p).powf(1.0 / beta)
                } else if beta == 1.0 {
                    p.powf(1.0 / alpha)
                } else {
                    Self::statrs_beta(alpha, beta).inverse_cdf(p)
                }
            }
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                truncated_weibull_sample(shape, scale, t_b, p.clamp(0.0, 1.0))
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Beta { alpha, beta } => rand_distr::Beta::new(alpha, beta)
                .expect("validated beta parameters")
                .sample(rng),
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                truncated_weibull_sample(shape, scale, t_b, rng.random::<f64>())
            }
        }
    }
}

impl std::fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistributionSpec::Beta { alpha, beta } => write!(f, "Beta({alpha}, {beta})"),
            DistributionSpec::TruncatedWeibull { shape, scale, t_b } => {
                write!(
                    f,
                    "TruncatedWeibull(shape={shape}, scale={scale}, t_b={t_b})"
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn beta_closed_forms() {
        let d = DistributionSpec::beta(1.0, 3.0);
        for t in [0.05, 0.3, 0.7] {
            assert!((d.survival(t) - (1.0 - t).powi(3)).abs() < 1e-12);
            assert!((d.pdf(t) - 3.0 * (1.0 - t).powi(2)).abs() < 1e-10);
        }
        // S_a = 0.75 level for Beta(1,3)
        assert!((d.quantile(0.25) - 0.0914).abs() < 1e-4);
        assert_eq!(d.survival(1.5), 0.0);
    }

    #[test]
    fn truncated_weibull_endpoints() {
        assert_eq!(truncated_weibull_sample(0.75, 1.5, 4.0, 1.0), 4.0);
        assert_eq!(truncated_weibull_sample(0.75, 1.5, 4.0, 0.0), 0.0);
        let d = DistributionSpec::truncated_weibull(0.75, 1.5, 4.0);
        let t = d.quantile(0.25);
        assert!((d.cdf(t) - 0.25).abs() < 1e-12);
        assert!((t - 0.233).abs() < 1e-3, "{t}");
    }

    #[test]
    fn samples_stay_in_support() {
        let mut rng = stream(3, 0);
        for d in [
            DistributionSpec::beta(0.5, 1.5),
            DistributionSpec::truncated_weibull(0.75, 1.5, 2.0),
        ] {
            for _ in 0..2000 {
                let x = d.sample(&mut rng);
                assert!((0.0..=d.support_end()).contains(&x));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DistributionSpec::beta(0.0, 1.0).validate().is_err());
        assert!(DistributionSpec::truncated_weibull(1.0, 1.0, -1.0)
            .validate()
            .is_err());
    }
}
