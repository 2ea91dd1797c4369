use pindex_core::{build_family, select_best, Criterion};
use pindex_sim::output::{percentile_curves_csv, records_csv, to_json};
use pindex_sim::*;

fn cfg() -> StudyConfig {
    StudyConfig::default()
}

#[test]
fn single_replication_fills_percentiles_with_its_record() {
    let dgp = Dgp::preset(DgpKind::Example3).unwrap();
    let s = run_replications(&dgp, 1, SelectionMethod::Bic, &cfg(), 5).unwrap();
    assert_eq!(s.records.len(), 1);
    let r = &s.records[0];
    for (_, v) in s.pi.unwrap().values() {
        assert_eq!(v, r.pi);
    }
    for (_, v) in s.sigma_hat.unwrap().values() {
        assert_eq!(v, r.sigma_hat);
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dgp = Dgp::preset(DgpKind::Example6).unwrap();
    let one = StudyConfig {
        threads: Some(1),
        ..cfg()
    };
    let eight = StudyConfig {
        threads: Some(8),
        ..cfg()
    };
    let a = run_replications(&dgp, 40, SelectionMethod::Adaptive, &one, 11).unwrap();
    let b = run_replications(&dgp, 40, SelectionMethod::Adaptive, &eight, 11).unwrap();
    assert_eq!(to_json(&a).unwrap(), to_json(&b).unwrap());
    assert_eq!(records_csv(&a).unwrap(), records_csv(&b).unwrap());
}

#[test]
fn replication_seeds_are_base_plus_index() {
    let dgp = Dgp::preset(DgpKind::Example4).unwrap();
    let s = run_replications(&dgp, 5, SelectionMethod::Bic, &cfg(), 100).unwrap();
    let seeds: Vec<u64> = s.records.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, vec![100, 101, 102, 103, 104]);
    let shifted = run_replications(&dgp, 4, SelectionMethod::Bic, &cfg(), 101).unwrap();
    assert_eq!(shifted.records[0].model, s.records[1].model);
    assert_eq!(shifted.records[0].pi, s.records[1].pi);
}

#[test]
fn widespread_failures_fail_the_study() {
    // Noiseless data makes the estimated variance zero, so every index fails.
    let dgp = Dgp::custom(
        30,
        0.0,
        DesignSpec::Linear {
            beta: vec![1.0, 0.0, 2.0],
            correlation: Correlation::Identity,
            nonlinear: false,
        },
    )
    .unwrap();
    let err = run_replications(&dgp, 10, SelectionMethod::Bic, &cfg(), 0).unwrap_err();
    assert_eq!(err.category(), "study");
}

#[test]
fn bootstrap_with_vanishing_noise_reselects() {
    let dgp = Dgp::preset(DgpKind::Example3).unwrap();
    let ds = generate_dataset(&dgp, 3).unwrap();
    let family = build_family(dgp.family_config()).unwrap();
    let mut sel = select_best(&ds, &family, Criterion::Bic).unwrap();
    sel.fit.sigma_hat2 = 1e-32;
    let b = parametric_bootstrap(&ds, &family, &sel, 100, &cfg(), 1).unwrap();
    assert!(b.reselection_frequency.unwrap() >= 0.99);
}

#[test]
fn bootstrap_of_one_resample() {
    let dgp = Dgp::preset(DgpKind::Example4).unwrap();
    let ds = generate_dataset(&dgp, 3).unwrap();
    let family = build_family(dgp.family_config()).unwrap();
    let sel = select_best(&ds, &family, Criterion::Bic).unwrap();
    let b = parametric_bootstrap(&ds, &family, &sel, 1, &cfg(), 1).unwrap();
    assert_eq!(b.outcomes.len() + b.failures.len(), 1);
    assert_eq!(b.outcomes.len(), 1);
}

#[test]
fn bootstrap_reselection_tracks_replication_proportion() {
    // When the selected model is the truth, resampling from the fit behaves
    // like fresh draws from the process.
    let dgp = Dgp::preset(DgpKind::Example3).unwrap();
    let family = build_family(dgp.family_config()).unwrap();
    let sim = run_replications(&dgp, 300, SelectionMethod::Bic, &cfg(), 900).unwrap();
    let truth_share = sim.true_model_proportion.unwrap();
    let mut shares = Vec::new();
    for seed in 0..40u64 {
        let ds = generate_dataset(&dgp, 5000 + seed).unwrap();
        let sel = select_best(&ds, &family, Criterion::Bic).unwrap();
        if sel.model.label() != "125" {
            continue;
        }
        let b = parametric_bootstrap(&ds, &family, &sel, 100, &cfg(), seed).unwrap();
        shares.push(b.reselection_frequency.unwrap());
    }
    let mean = shares.iter().sum::<f64>() / shares.len() as f64;
    assert!(shares.len() >= 20);
    assert!(
        (mean - truth_share).abs() < 0.1,
        "bootstrap {mean} vs replication {truth_share}"
    );
}

#[test]
fn subsample_hygiene() {
    let dgp = Dgp::preset(DgpKind::Example3).unwrap().with_n(120);
    let ds = generate_dataset(&dgp, 2).unwrap();
    let family = build_family(dgp.family_config()).unwrap();
    let r = subsample_study(&ds, &family, SelectionMethod::Bic, &[119], 1, &cfg(), 0).unwrap();
    assert_eq!(r.curves[0].completed, 1);
    let r = subsample_study(
        &ds,
        &family,
        SelectionMethod::Bic,
        &[60, 80, 60],
        2,
        &cfg(),
        0,
    )
    .unwrap();
    assert_eq!(
        r.curves.iter().map(|c| c.size).collect::<Vec<_>>(),
        vec![60, 80]
    );
    assert_eq!(r.warnings.len(), 1);
    let err = subsample_study(&ds, &family, SelectionMethod::Bic, &[50, 120], 2, &cfg(), 0);
    assert_eq!(err.unwrap_err().category(), "parameter");
}

#[test]
fn subsample_index_grows_with_size() {
    let dgp = Dgp::preset(DgpKind::Example3).unwrap().with_n(1000);
    let ds = generate_dataset(&dgp, 8).unwrap();
    let family = build_family(dgp.family_config()).unwrap();
    let r = subsample_study(
        &ds,
        &family,
        SelectionMethod::Bic,
        &[100, 200, 400],
        100,
        &cfg(),
        4,
    )
    .unwrap();
    let med: Vec<f64> = r
        .curves
        .iter()
        .map(|c| c.pi.as_ref().unwrap().p50)
        .collect();
    assert!(med[0] < med[1] && med[1] < med[2], "{med:?}");
    let csv = percentile_curves_csv(
        r.curves
            .iter()
            .map(|c| ("pi", c.size as f64, c.pi.as_ref().unwrap())),
    )
    .unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 7);
}

#[test]
fn oracle_intervals_have_nominal_coverage() {
    let dgp = Dgp::preset(DgpKind::Example3).unwrap();
    let c = coverage_study(&dgp, 0.95, 300, &cfg(), 21, true).unwrap();
    // 900 intervals; Monte Carlo standard error about 0.007.
    assert!((c.overall - 0.95).abs() < 0.03, "{}", c.overall);
    let c90 = coverage_study(&dgp, 0.9, 300, &cfg(), 21, true).unwrap();
    assert!((c90.overall - 0.9).abs() < 0.035, "{}", c90.overall);
}

#[test]
fn coverage_needs_a_finite_truth() {
    let dgp = Dgp::preset(DgpKind::Example7).unwrap();
    let err = coverage_study(&dgp, 0.95, 10, &cfg(), 0, false).unwrap_err();
    assert_eq!(err.category(), "parameter");
    let dgp = Dgp::preset(DgpKind::Example3).unwrap();
    assert!(coverage_study(&dgp, 1.0, 10, &cfg(), 0, false).is_err());
}

#[test]
fn agreeing_selectors_share_one_risk() {
    // A single candidate predictor leaves one admissible model.
    let dgp = Dgp::custom(
        50,
        1.0,
        DesignSpec::Linear {
            beta: vec![2.0],
            correlation: Correlation::Identity,
            nonlinear: false,
        },
    )
    .unwrap();
    let r = risk_comparison(&dgp, 30, &cfg(), 0).unwrap();
    assert_eq!(r.aic, r.bic);
    assert_eq!(r.aic, r.adaptive);
}

#[test]
fn true_model_risk_bounds_every_selector() {
    for kind in [
        DgpKind::Example3,
        DgpKind::Example4,
        DgpKind::Example5,
        DgpKind::Example6,
    ] {
        let dgp = Dgp::preset(kind).unwrap();
        let r = risk_comparison(&dgp, 200, &cfg(), 13).unwrap();
        let o = r.oracle.unwrap();
        for m in [r.aic, r.bic, r.adaptive] {
            assert!(
                o.mean <= m.mean + 2.0 * m.se.max(o.se),
                "{kind}: {o:?} vs {m:?}"
            );
        }
    }
}

#[test]
fn parametric_truth_keeps_its_approximation_gap_growing() {
    let dgp = Dgp::preset(DgpKind::Example1Case2).unwrap();
    let pts = condition_trend(&dgp, &[100, 400, 1600], 6, &cfg(), 3).unwrap();
    let a: Vec<f64> = pts.iter().map(|p| p.diagnostics.a_n.unwrap()).collect();
    assert!(a[0] < a[1] && a[1] < a[2], "{a:?}");
}

#[test]
fn summary_round_trips_through_json() {
    let dgp = Dgp::preset(DgpKind::Example1Case2).unwrap().with_n(60);
    let s = run_replications(&dgp, 3, SelectionMethod::Bic, &cfg(), 1).unwrap();
    let back: SimSummary = serde_json::from_str(&to_json(&s).unwrap()).unwrap();
    assert_eq!(back, s);
    assert_eq!(records_csv(&s).unwrap().lines().count(), 4);
}
