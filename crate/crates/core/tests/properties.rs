use curesurv::cure_rate::eta_tail_sample;
use curesurv::inference::{normal_interval, normal_quantile, two_sided_p};
use curesurv::km::{km_fit, risk_table, KmTarget};
use curesurv::susceptible::susceptible_curve;
use curesurv::tau::{pair_terms, tau_a_curve, tau_curve};
use curesurv::{CureRateEstimate, Sample, Side};
use proptest::prelude::*;

/// Observations on a coarse lattice, so ties between and within event and
/// censoring times are common.
fn tied_sample() -> impl Strategy<Value = Sample> {
    prop::collection::vec((1u32..20, any::<bool>()), 1..60)
        .prop_map(|v| Sample::from_pairs(v.into_iter().map(|(t, e)| (f64::from(t) * 0.25, e))))
}

/// Distinct times, at least one event.
fn tie_free_sample() -> impl Strategy<Value = Sample> {
    prop::collection::btree_set(1u32..100_000, 2..80)
        .prop_flat_map(|times| {
            let n = times.len();
            (Just(times), prop::collection::vec(any::<bool>(), n))
        })
        .prop_filter("needs an event", |(_, ev)| ev.iter().any(|&e| e))
        .prop_map(|(times, ev)| {
            Sample::from_pairs(times.into_iter().map(|t| f64::from(t) * 1e-4).zip(ev))
        })
}

fn with_event(s: Sample) -> Option<Sample> {
    (s.event_count() > 0).then_some(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn km_curves_are_survival_functions(s in tied_sample()) {
        for target in [KmTarget::Event, KmTarget::Censoring] {
            let f = km_fit(&s, target);
            prop_assert_eq!(f.initial(), 1.0);
            let mut prev = 1.0;
            for &v in f.values() {
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn right_evaluation_is_right_continuous(s in tied_sample()) {
        let f = km_fit(&s, KmTarget::Event);
        let jumps = f.jump_times().to_vec();
        for (k, &t) in jumps.iter().enumerate() {
            let gap = jumps.get(k + 1).map_or(1.0, |&u| u - t);
            for eps in [gap * 0.5, gap * 1e-6] {
                prop_assert_eq!(f.eval(t, Side::Right), f.eval(t + eps, Side::Right));
            }
        }
    }

    #[test]
    fn tail_estimate_is_km_at_last_event(s in tied_sample()) {
        if let Some(s) = with_event(s) {
            let eta = eta_tail_sample(&s).unwrap();
            let t_k = risk_table(&s).unwrap().last_event_time().unwrap();
            prop_assert_eq!(eta.value, km_fit(&s, KmTarget::Event).eval(t_k, Side::Right));
        }
    }

    #[test]
    fn three_forms_agree_without_ties(s in tie_free_sample()) {
        let eta = eta_tail_sample(&s).unwrap();
        let sc = susceptible_curve(&s, &eta).unwrap();
        prop_assert!(sc.form_divergence.unwrap() <= 1e-12);
        let t_k = risk_table(&s).unwrap().last_event_time().unwrap();
        prop_assert_eq!(sc.curve.at(t_k), 0.0);
        prop_assert!(sc.curve.values().windows(2).all(|v| v[1] <= v[0]));
    }

    #[test]
    fn tau_is_antisymmetric(a in tied_sample(), b in tied_sample()) {
        let (Some(a), Some(b)) = (with_event(a), with_event(b)) else { return Ok(()) };
        let ab = tau_curve(&a, &b, None).unwrap();
        let ba = tau_curve(&b, &a, Some(&ab.grid)).unwrap();
        prop_assert_eq!(ab.negated().values, ba.values);

        let (ea, eb) = (eta_tail_sample(&a).unwrap(), eta_tail_sample(&b).unwrap());
        if ea.value < 1.0 && eb.value < 1.0 {
            if let Ok(sab) = tau_a_curve(&a, &b, &ea, &eb, None) {
                let sba = tau_a_curve(&b, &a, &eb, &ea, Some(&sab.grid)).unwrap();
                prop_assert_eq!(sab.negated().values, sba.values);
            }
        }
    }

    #[test]
    fn zero_cure_tau_a_is_tau(a in tied_sample(), b in tied_sample()) {
        let (Some(a), Some(b)) = (with_event(a), with_event(b)) else { return Ok(()) };
        let z = CureRateEstimate::fixed(0.0);
        let o = tau_curve(&a, &b, None).unwrap();
        let s = tau_a_curve(&a, &b, &z, &z, Some(&o.grid)).unwrap();
        for (x, y) in o.values.iter().zip(&s.values) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn tau_is_flat_past_last_orderable_pair(a in tied_sample(), b in tied_sample()) {
        let (Some(a), Some(b)) = (with_event(a), with_event(b)) else { return Ok(()) };
        let c = tau_curve(&a, &b, None).unwrap();
        let last = pair_terms(&a, &b, None)
            .unwrap()
            .iter()
            .filter(|p| p.orderable)
            .map(|p| p.x_tilde)
            .fold(f64::NEG_INFINITY, f64::max);
        if last.is_finite() {
            let at_last = c.value_at(last);
            for t in [last + 1e-9, last + 1.0, 1e9] {
                prop_assert_eq!(c.value_at(t), at_last);
            }
        }
    }

    #[test]
    fn complete_data_tau_is_kendall_count(
        x in prop::collection::vec(1u32..500, 1..30),
        y in prop::collection::vec(1u32..500, 1..30),
    ) {
        let a = Sample::from_pairs(x.iter().map(|&t| (f64::from(t), true)));
        let b = Sample::from_pairs(y.iter().map(|&t| (f64::from(t), true)));
        let mut count = 0i64;
        for &u in &x {
            for &v in &y {
                count += i64::from(u < v) - i64::from(v < u);
            }
        }
        let c = tau_curve(&a, &b, Some(&[1e6])).unwrap();
        if count == 0 && c.values.is_empty() {
            return Ok(());
        }
        prop_assert_eq!(c.values[0], count as f64 / (x.len() * y.len()) as f64);
    }

    #[test]
    fn normal_interval_width_and_monotonicity(
        point in -5.0f64..5.0,
        sd in 0.0f64..3.0,
        lo in 0.01f64..0.98,
        step in 0.001f64..0.01,
    ) {
        let hi = lo + step;
        let (a, b) = normal_interval(point, sd, lo).unwrap();
        let z = normal_quantile(0.5 * (1.0 + lo));
        prop_assert_eq!((point + z * sd) - (point - z * sd), b - a);
        let (c, d) = normal_interval(point, sd, hi).unwrap();
        prop_assert!(c <= a && b <= d);
    }

    #[test]
    fn p_value_agrees_with_interval(est in -1.0f64..1.0, sd in 1e-3f64..1.0, level in 0.5f64..0.999) {
        let (lo, hi) = normal_interval(est, sd, level).unwrap();
        let z = est.abs() / sd;
        let z_crit = normal_quantile(0.5 * (1.0 + level));
        // skip the measure-zero boundary where the two computations round apart
        if (z - z_crit).abs() > 1e-12 {
            let p = two_sided_p(est, sd);
            prop_assert_eq!(p < 1.0 - level, lo > 0.0 || hi < 0.0);
        }
    }
}
