//! Seeded nonparametric bootstrap, normal intervals and the two-sample
//! cure-rate difference test.
//!
//! Replicate `r` draws from its own stream `(seed, r)`, so the replicate
//! values do not depend on how the work is scheduled across threads.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::cure_rate::{
    eta_extrapolated_or_tail, eta_extrapolated_sample, eta_tail_sample, CureError, CureRateEstimate,
};
use crate::rng::stream;
use crate::sample_io::Sample;
use crate::sum::NeumaierSum;

#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("at least 2 bootstrap replicates are required, got {0}")]
    TooFewReplicates(usize),
    #[error("statistic undefined on the original sample: {0}")]
    UndefinedPoint(String),
    #[error("statistic undefined in {missing} of {replicates} bootstrap replicates")]
    Unstable { missing: usize, replicates: usize },
    #[error("confidence level {0} must lie in (0, 1)")]
    BadLevel(f64),
    #[error("standard deviation {0} must be non-negative")]
    BadSd(f64),
    #[error("expected {expected} sample(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Cure(#[from] CureError),
}

/// How a single arm's cure fraction is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaMethod {
    Tail,
    /// Extrapolated with scale `b`; degenerate windows are undefined.
    Extrapolated {
        b: f64,
    },
    /// Extrapolated with scale `b`, falling back to the tail estimate when
    /// the window is degenerate.
    ExtrapolatedOrTail {
        b: f64,
    },
}

impl EtaMethod {
    pub fn estimate(&self, sample: &Sample) -> Result<CureRateEstimate, CureError> {
        match *self {
            EtaMethod::Tail => eta_tail_sample(sample),
            EtaMethod::Extrapolated { b } => eta_extrapolated_sample(sample, b),
            EtaMethod::ExtrapolatedOrTail { b } => eta_extrapolated_or_tail(sample, b),
        }
    }
}

/// Named scalar statistics over one or two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    Constant {
        value: f64,
    },
    /// Cure fraction of a single sample.
    CureRate {
        method: EtaMethod,
    },
    /// `eta_1 - eta_0` over two samples.
    CureDifference {
        arm0: EtaMethod,
        arm1: EtaMethod,
    },
}

impl Statistic {
    pub fn arity(&self) -> Option<usize> {
        match self {
            Statistic::Constant { .. } => None,
            Statistic::CureRate { .. } => Some(1),
            Statistic::CureDifference { .. } => Some(2),
        }
    }

    pub fn evaluate(&self, samples: &[Sample]) -> Result<f64, CureError> {
        match self {
            Statistic::Constant { value } => Ok(*value),
            Statistic::CureRate { method } => Ok(method.estimate(&samples[0])?.value),
            Statistic::CureDifference { arm0, arm1 } => {
                Ok(arm1.estimate(&samples[1])?.value - arm0.estimate(&samples[0])?.value)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    /// One entry per replicate; `None` where the statistic was undefined.
    pub replicate_values: Vec<Option<f64>>,
    pub point: f64,
    pub sd: f64,
    pub seed: u64,
    pub replicates: usize,
    pub missing: usize,
}

/// Bootstrap of a vector-valued statistic. Replicates where the statistic
/// is undefined are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorBootstrap {
    pub point: Vec<f64>,
    pub replicates: Vec<Option<Vec<f64>>>,
    pub sd: Vec<f64>,
    pub seed: u64,
    pub missing: usize,
}

/// Resample every arm independently with stream `(seed, index)`.
pub fn resample_arms(samples: &[Sample], seed: u64, index: u64) -> Vec<Sample> {
    let mut rng = stream(seed, index);
    samples.iter().map(|s| s.resample(&mut rng)).collect()
}

/// Sample standard deviation (`n - 1` divisor); exactly 0 when all values are
/// equal.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return 0.0;
    }
    let mean = values.iter().copied().collect::<NeumaierSum>().value() / n as f64;
    let ss: NeumaierSum = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (ss.value() / (n - 1) as f64).sqrt()
}

fn check_missing(missing: usize, replicates: usize) -> Result<(), InferenceError> {
    if 2 * missing > replicates || replicates - missing < 2 {
        return Err(InferenceError::Unstable {
            missing,
            replicates,
        });
    }
    Ok(())
}

/// Bootstrap a vector statistic `f`. `f` returns `None` when undefined.
pub fn bootstrap_vector<F>(
    samples: &[Sample],
    replicates: usize,
    seed: u64,
    f: F,
) -> Result<VectorBootstrap, InferenceError>
where
    F: Fn(&[Sample]) -> Option<Vec<f64>> + Sync,
{
    if replicates < 2 {
        return Err(InferenceError::TooFewReplicates(replicates));
    }
    let point =
        f(samples).ok_or_else(|| InferenceError::UndefinedPoint("vector statistic".to_string()))?;
    let reps: Vec<Option<Vec<f64>>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| f(&resample_arms(samples, seed, r)))
        .collect();
    let missing = reps.iter().filter(|r| r.is_none()).count();
    check_missing(missing, replicates)?;
    let valid: Vec<&Vec<f64>> = reps.iter().flatten().collect();
    let sd = (0..point.len())
        .map(|k| sample_sd(&valid.iter().map(|v| v[k]).collect::<Vec<_>>()))
        .collect();
    Ok(VectorBootstrap {
        point,
        replicates: reps,
        sd,
        seed,
        missing,
    })
}

/// Bootstrap SD of a named statistic, resampling within each arm.
pub fn bootstrap_stats(
    samples: &[Sample],
    statistic: &Statistic,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapResult, InferenceError> {
    if let Some(k) = statistic.arity() {
        if samples.len() != k {
            return Err(InferenceError::Arity {
                expected: k,
                got: samples.len(),
            });
        }
    }
    if replicates < 2 {
        return Err(InferenceError::TooFewReplicates(replicates));
    }
    let point = statistic
        .evaluate(samples)
        .map_err(|e| InferenceError::UndefinedPoint(e.to_string()))?;
    let replicate_values: Vec<Option<f64>> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| statistic.evaluate(&resample_arms(samples, seed, r)).ok())
        .collect();
    let missing = replicate_values.iter().filter(|v| v.is_none()).count();
    check_missing(missing, replicates)?;
    let valid: Vec<f64> = replicate_values.iter().flatten().copied().collect();
    Ok(BootstrapResult {
        sd: sample_sd(&valid),
        replicate_values,
        point,
        seed,
        replicates,
        missing,
    })
}

/// Standard normal quantile (Wichura's AS 241, relative accuracy ~1e-16).
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_854e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_545,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_049e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// `point -/+ z_{(1+level)/2} sd`.
pub fn normal_interval(point: f64, sd: f64, level: f64) -> Result<(f64, f64), InferenceError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(InferenceError::BadLevel(level));
    }
    if sd.is_nan() || sd < 0.0 {
        return Err(InferenceError::BadSd(sd));
    }
    let half = normal_quantile(0.5 * (1.0 + level)) * sd;
    Ok((point - half, point + half))
}

/// Two-sided normal tail probability of `estimate / sd`.
pub fn two_sided_p(estimate: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return if estimate == 0.0 { 1.0 } else { 0.0 };
    }
    erfc((estimate / sd).abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// Cure-rate estimator applied to both arms; extrapolated windows that turn
/// out degenerate fall back to the tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DifferenceMethod {
    Tail,
    Extrapolated { b0: f64, b1: f64 },
}

impl DifferenceMethod {
    fn arms(&self) -> (EtaMethod, EtaMethod) {
        match *self {
            DifferenceMethod::Tail => (EtaMethod::Tail, EtaMethod::Tail),
            DifferenceMethod::Extrapolated { b0, b1 } => (
                EtaMethod::ExtrapolatedOrTail { b: b0 },
                EtaMethod::ExtrapolatedOrTail { b: b1 },
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub eta0: f64,
    pub eta1: f64,
    /// `eta_1 - eta_0`.
    pub difference: f64,
    pub sd: f64,
    pub ci: (f64, f64),
    pub level: f64,
    pub p_value: f64,
    pub method: DifferenceMethod,
    pub replicates: usize,
    pub missing: usize,
}

impl TestResult {
    /// Flat `key = value` block.
    pub fn to_kv(&self) -> String {
        let method = match self.method {
            DifferenceMethod::Tail => "tail".to_string(),
            DifferenceMethod::Extrapolated { b0, b1 } => format!("extrapolated(b0={b0}, b1={b1})"),
        };
        format!(
            "method = {method}\neta0 = {}\neta1 = {}\ndifference = {}\nsd = {}\nlevel = {}\nci_low = {}\nci_high = {}\np_value = {:e}\nreplicates = {}\nmissing = {}\n",
            self.eta0,
            self.eta1,
            self.difference,
            self.sd,
            self.level,
            self.ci.0,
            self.ci.1,
            self.p_value,
            self.replicates,
            self.missing
        )
    }
}

/// Test of `eta_1 - eta_0 = 0` with a bootstrap SD and normal interval.
pub fn cure_difference_test(
    sample0: &Sample,
    sample1: &Sample,
    method: DifferenceMethod,
    replicates: usize,
    seed: u64,
    level: f64,
) -> Result<TestResult, InferenceError> {
    let (m0, m1) = method.arms();
    let eta0 = m0.estimate(sample0)?.value;
    let eta1 = m1.estimate(sample1)?.value;
    let stat = Statistic::CureDifference { arm0: m0, arm1: m1 };
    let boot = bootstrap_stats(&[sample0.clone(), sample1.clone()], &stat, replicates, seed)?;
    let ci = normal_interval(boot.point, boot.sd, level)?;
    Ok(TestResult {
        eta0,
        eta1,
        difference: boot.point,
        sd: boot.sd,
        ci,
        level,
        p_value: two_sided_p(boot.point, boot.sd),
        method,
        replicates,
        missing: boot.missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::km::tests::d1;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn quantile_agrees_with_reference() {
        let n = Normal::standard();
        for p in [
            1e-12,
            1e-6,
            0.01,
            0.1,
            0.3,
            0.5,
            0.7,
            0.975,
            0.999,
            1.0 - 1e-9,
        ] {
            let z = normal_quantile(p);
            assert!((z - n.inverse_cdf(p)).abs() < 1e-9, "{p}: {z}");
        }
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
    }

    #[test]
    fn interval_matches_printed_example() {
        let (lo, hi) = normal_interval(0.244, 0.0406, 0.95).unwrap();
        assert!(
            (lo - 0.164).abs() <= 1e-3 && (hi - 0.323).abs() <= 1e-3,
            "{lo} {hi}"
        );
        let p = two_sided_p(0.244, 0.0406);
        assert!((1.5e-9..=2.5e-9).contains(&p), "{p}");
    }

    #[test]
    fn zero_sd_interval_is_a_point() {
        assert_eq!(normal_interval(0.3, 0.0, 0.9).unwrap(), (0.3, 0.3));
        assert!(normal_interval(0.3, 0.1, 1.0).is_err());
        assert!(normal_interval(0.3, -0.1, 0.9).is_err());
    }

    #[test]
    fn constant_statistic_has_zero_sd() {
        let r = bootstrap_stats(&[d1()], &Statistic::Constant { value: 0.5 }, 20, 1).unwrap();
        assert_eq!(r.sd, 0.0);
        assert_eq!(r.missing, 0);
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let stat = Statistic::CureRate {
            method: EtaMethod::Tail,
        };
        let a = bootstrap_stats(&[d1()], &stat, 300, 42).unwrap();
        let b = bootstrap_stats(&[d1()], &stat, 300, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.sd.is_finite() && a.sd > 0.0);
        assert!((a.point - 8.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_does_not_change_replicates() {
        let stat = Statistic::CureRate {
            method: EtaMethod::Tail,
        };
        let par = bootstrap_stats(&[d1()], &stat, 200, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let ser = pool.install(|| bootstrap_stats(&[d1()], &stat, 200, 9).unwrap());
        assert_eq!(par, ser);
    }

    #[test]
    fn mostly_undefined_statistic_is_an_error() {
        // defined only when the first subject is drawn exactly once
        let r = bootstrap_vector(&[d1()], 200, 3, |s| {
            let hit = s[0].subjects().iter().filter(|x| x.time == 1.0).count();
            (hit == 1).then(|| vec![1.0])
        });
        assert!(matches!(r, Err(InferenceError::Unstable { .. })), "{r:?}");
    }

    #[test]
    fn arity_is_checked() {
        let stat = Statistic::CureDifference {
            arm0: EtaMethod::Tail,
            arm1: EtaMethod::Tail,
        };
        assert_eq!(
            bootstrap_stats(&[d1()], &stat, 10, 1),
            Err(InferenceError::Arity {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn test_result_is_consistent() {
        let s0 = d1();
        let s1 = Sample::from_pairs([
            (0.5, true),
            (1.5, true),
            (2.0, false),
            (6.0, false),
            (7.0, false),
        ]);
        let r = cure_difference_test(&s0, &s1, DifferenceMethod::Tail, 200, 5, 0.95).unwrap();
        assert!(r.ci.0 <= r.difference && r.difference <= r.ci.1);
        assert!((0.0..=1.0).contains(&r.p_value));
        let excludes_zero = r.ci.0 > 0.0 || r.ci.1 < 0.0;
        assert_eq!(r.p_value < 0.05, excludes_zero);
        assert!(r.to_kv().contains("method = tail"));
    }

    #[test]
    fn vector_bootstrap_counts_missing() {
        let v = bootstrap_vector(&[d1()], 50, 2, |s| {
            let e = eta_tail_sample(&s[0]).ok()?;
            Some(vec![e.value, 2.0 * e.value])
        })
        .unwrap();
        assert_eq!(v.replicates.len(), 50);
        assert!((v.sd[1] - 2.0 * v.sd[0]).abs() < 1e-12);
    }
}
