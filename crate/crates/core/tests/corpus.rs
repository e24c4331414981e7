//! Identities checked on a corpus of random tie-free samples, against
//! brute-force recomputation from the raw observations.

use curesurv::cure_rate::eta_tail_sample;
use curesurv::km::{km_fit, risk_table, KmTarget};
use curesurv::simlab::tie_free_corpus;
use curesurv::susceptible::{
    ipcw_form, location_scale, phi_hat, product_limit_form, self_consistency_residual,
    susceptible_curve,
};
use curesurv::Sample;

fn corpus() -> Vec<Sample> {
    tie_free_corpus(1000, 20_240_611)
}

/// Product-limit survival of the event (`events = true`) or censoring
/// times at `t`, straight from the definition.
fn brute_km(s: &Sample, t: f64, events: bool) -> f64 {
    let mut surv = 1.0;
    for x in s
        .subjects()
        .iter()
        .filter(|x| x.time <= t && x.event == events)
    {
        let at_risk = s.subjects().iter().filter(|y| y.time >= x.time).count();
        surv *= 1.0 - 1.0 / at_risk as f64;
    }
    surv
}

fn brute_g_left(s: &Sample, t: f64) -> f64 {
    let mut surv = 1.0;
    for x in s.subjects().iter().filter(|x| x.time < t && !x.event) {
        let at_risk = s.subjects().iter().filter(|y| y.time >= x.time).count();
        surv *= 1.0 - 1.0 / at_risk as f64;
    }
    surv
}

fn sorted_times(s: &Sample) -> Vec<f64> {
    let mut t: Vec<f64> = s.subjects().iter().map(|x| x.time).collect();
    t.sort_by(f64::total_cmp);
    t
}

#[test]
fn corpus_is_tie_free_and_sized() {
    let c = corpus();
    assert_eq!(c.len(), 1000);
    for s in &c {
        assert!((5..=200).contains(&s.len()));
        assert!(s.event_count() > 0);
        assert!(sorted_times(s).windows(2).all(|w| w[0] < w[1]));
    }
    assert_eq!(tie_free_corpus(3, 1), tie_free_corpus(3, 1));
}

#[test]
fn km_matches_brute_force() {
    for s in corpus().iter().step_by(10) {
        let km = km_fit(s, KmTarget::Event);
        let g = km_fit(s, KmTarget::Censoring);
        for t in sorted_times(s) {
            assert!((km.at(t) - brute_km(s, t, true)).abs() <= 1e-12);
            assert!((g.at(t) - brute_km(s, t, false)).abs() <= 1e-12);
        }
    }
}

#[test]
fn three_forms_agree_with_tail_estimate() {
    let mut worst = 0.0f64;
    for s in &corpus() {
        let eta = eta_tail_sample(s).unwrap();
        let table = risk_table(s).unwrap();
        let (ls, _) = location_scale(&km_fit(s, KmTarget::Event), eta.value);
        let w = ipcw_form(&table);
        let pl = product_limit_form(&table);
        for t in sorted_times(s) {
            worst = worst
                .max((ls.at(t) - w.at(t)).abs())
                .max((ls.at(t) - pl.at(t)).abs());
        }
        let sc = susceptible_curve(s, &eta).unwrap();
        assert!(sc.form_divergence.unwrap() <= 1e-12);
        // the tail estimate zeroes the curve from the last event on
        let t_k = table.last_event_time().unwrap();
        assert_eq!(sc.curve.at(t_k), 0.0);
        assert!(sc.curve.values().windows(2).all(|v| v[1] <= v[0]));
    }
    assert!(worst <= 1e-12, "max divergence {worst:e}");
}

#[test]
fn product_limit_form_is_self_consistent() {
    let mut worst = 0.0f64;
    for s in &corpus() {
        let eta = eta_tail_sample(s).unwrap();
        let pl = product_limit_form(&risk_table(s).unwrap());
        worst = worst.max(
            self_consistency_residual(&pl, s, &eta)
                .unwrap()
                .max_residual,
        );
    }
    assert!(worst <= 1e-10, "max residual {worst:e}");
}

#[test]
fn ipcw_reconstruction_matches_km() {
    for s in &corpus() {
        let km = km_fit(s, KmTarget::Event);
        let table = risk_table(s).unwrap();
        let f = table.ipcw_cdf();
        let n = s.len() as f64;
        for t in sorted_times(s) {
            assert!((f.at(t) - (1.0 - km.at(t))).abs() <= 1e-12);
            // oracle: weights from the brute-force censoring curve
            let direct: f64 = s
                .subjects()
                .iter()
                .filter(|x| x.event && x.time <= t)
                .map(|x| 1.0 / brute_g_left(s, x.time))
                .sum::<f64>()
                / n;
            assert!((f.at(t) - direct).abs() <= 1e-12);
        }
        // total IPCW mass is the susceptible share
        let eta = eta_tail_sample(s).unwrap().value;
        let mass: f64 = table.rows.iter().map(|r| r.d_tilde).sum();
        assert!(
            (mass - n * (1.0 - eta)).abs() <= 1e-12,
            "mass {mass} vs {}",
            n * (1.0 - eta)
        );
        assert_eq!(eta, km.at(table.last_event_time().unwrap()));
    }
}

#[test]
fn phi_stays_in_unit_interval() {
    for s in &corpus() {
        let eta = eta_tail_sample(s).unwrap();
        let phi = phi_hat(s, &eta).unwrap();
        assert_eq!(phi.times, sorted_times(s));
        // past the last event the risk set is all cured and phi is zero up
        // to rounding in `eta G(t-) / (Y(t) / n)`
        for (t, v) in phi.times.iter().zip(&phi.values) {
            assert!((-1e-12..=1.0 + 1e-12).contains(v), "phi({t}) = {v}");
        }
    }
}
