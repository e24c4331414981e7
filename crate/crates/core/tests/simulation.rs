use curesurv::dist::DistributionSpec;
use curesurv::simlab::{draw_sample, preset, run_experiment, Design, GridSpec, RowPoint, Scenario};

#[test]
fn cured_fraction_converges() {
    // with censoring far past the latency support every susceptible is
    // observed, so the censored share is the cured share
    let n = 100_000;
    for eta in [0.2, 0.4] {
        let s = Scenario::new(DistributionSpec::beta(1.0, 3.0), eta, 1e9, n).unwrap();
        let sample = draw_sample(&s, 77);
        let cured = sample
            .subjects()
            .iter()
            .filter(|x| !x.event && x.time > 1.0)
            .count();
        assert_eq!(cured, n - sample.event_count());
        let p = cured as f64 / n as f64;
        let half_width = 3.29 * (eta * (1.0 - eta) / n as f64).sqrt();
        assert!((p - eta).abs() < half_width, "eta {eta}: observed {p}");
    }
}

#[test]
fn table_rows_carry_latency_truths() {
    let p = preset("table1-eta02").unwrap();
    let report = run_experiment(&p.experiment(4, 10, 5)).unwrap();
    let Design::OneArm { scenario } = p.design else {
        panic!("one-arm preset")
    };
    let times = GridSpec::default_levels().times(&scenario.latency);
    assert_eq!(report.rows.len(), 7);
    for ((row, t), level) in report
        .rows
        .iter()
        .zip(&times)
        .zip([0.75, 0.65, 0.55, 0.45, 0.35, 0.25])
    {
        assert_eq!(row.t, RowPoint::Time(*t));
        assert!((row.truth - level).abs() < 1e-12);
    }
    assert_eq!(report.rows[6].t, RowPoint::Cure);
    assert_eq!(report.rows[6].truth, 0.2);
    // first level point of Beta(1,3): 1 - 0.75^(1/3)
    assert!((times[0] - (1.0 - 0.75f64.cbrt())).abs() < 1e-12);
}
