mod common;

use approx::assert_relative_eq;
use common::{mask_columns, mask_terms, normal_equations, normals, random_subset_dataset};
use pindex_core::model_space::polynomial_dataset;
use pindex_core::pi::{NESTED_CUTOFF, SUBSET_CUTOFF};
use pindex_core::{
    adaptive_select, build_family, classify, compute_pi, ic_value, least_squares_fit, select_best,
    Classification, Criterion, Dataset, FamilyConfig, FamilyKind, IcConfig, ModelSpec, SigmaMode,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// PI recomputed from scratch: IC of every drop-one sub-model (intercept
/// kept) at the selected model's σ̂², divided by IC of the selected model.
fn hand_pi(ds: &Dataset, selected: &ModelSpec) -> f64 {
    let n = ds.n();
    let mask: u64 = selected.terms.iter().map(|t| 1u64 << (t - 1)).sum();
    let r = selected.terms.len() + 1;
    let (_, rss) = normal_equations(ds.y(), &mask_columns(ds, mask));
    let s2 = rss / (n - r) as f64;
    let ln = (n as f64).ln();
    let ic = |rss: f64, r: usize| rss + ln * r as f64 * s2 - n as f64 * s2;
    let top = ic(rss, r);
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| {
            let (_, sub) = normal_equations(ds.y(), &mask_columns(ds, mask & !(1 << b)));
            ic(sub, r - 1) / top
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn pi_matches_hand_computation_on_subset_problems() {
    for seed in 0..20 {
        let ds = random_subset_dataset(seed, 120, 6);
        let family = build_family(FamilyConfig::all_subset(6)).unwrap();
        let sel = select_best(&ds, &family, Criterion::Bic).unwrap();
        let report = compute_pi(&ds, &sel, &family, &IcConfig::default(), None).unwrap();
        if sel.model.terms.is_empty() {
            continue;
        }
        assert_relative_eq!(report.pi, hand_pi(&ds, &sel.model), max_relative = 1e-9);
    }
}

#[test]
fn bic_choice_is_brute_force_argmin_for_small_p() {
    for p in 1..=8usize {
        let ds = random_subset_dataset(40 + p as u64, 70, p);
        let n = ds.n() as f64;
        let family = build_family(FamilyConfig::all_subset(p)).unwrap();
        let got = select_best(&ds, &family, Criterion::Bic).unwrap();
        let best = (1u64..(1 << p))
            .map(|m| {
                let (_, rss) = normal_equations(ds.y(), &mask_columns(&ds, m));
                (n * (rss / n).ln() + n.ln() * (m.count_ones() + 1) as f64, m)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        assert_eq!(got.model, ModelSpec::subset(mask_terms(best.1), true));
    }
}

#[test]
fn rank_one_selection_reports_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = normals(&mut rng, 30);
    let ds = polynomial_dataset(&x, normals(&mut rng, 30), 1).unwrap();
    let family = build_family(FamilyConfig::nested(1)).unwrap();
    let sel = select_best(&ds, &family, Criterion::Bic).unwrap();
    let mut only_intercept = sel.clone();
    only_intercept.model = ModelSpec::intercept_only(FamilyKind::Nested);
    only_intercept.fit = least_squares_fit(&ds, &only_intercept.model).unwrap();
    let report = compute_pi(&ds, &only_intercept, &family, &IcConfig::default(), None).unwrap();
    assert_eq!(report.pi, 30.0);
    assert!(report.rank_one_convention);
}

#[test]
fn classification_boundary_is_inclusive() {
    assert_eq!(
        classify(1.6, FamilyKind::Nested, None),
        Classification::PracticallyParametric
    );
    assert_eq!(
        classify(1.6 - 1e-12, FamilyKind::Nested, None),
        Classification::PracticallyNonparametric
    );
    assert_eq!(
        classify(1.2, FamilyKind::AllSubset, None),
        Classification::PracticallyParametric
    );
    assert_eq!(NESTED_CUTOFF, 1.6);
    assert_eq!(SUBSET_CUTOFF, 1.2);
    assert_eq!(
        classify(1.3, FamilyKind::AllSubset, Some(1.5)),
        Classification::PracticallyNonparametric
    );
}

#[test]
fn adaptive_rule_follows_the_index() {
    for seed in 0..15 {
        let ds = random_subset_dataset(seed, 60, 7);
        let family = build_family(FamilyConfig::all_subset(7)).unwrap();
        let a = adaptive_select(&ds, &family, &IcConfig::default(), None).unwrap();
        let expect = if a.pi.pi < SUBSET_CUTOFF {
            Criterion::Aic
        } else {
            Criterion::Bic
        };
        assert_eq!(a.chosen, expect);
        assert_eq!(a.selected().criterion, expect);
    }
}

fn scaled(ds: &Dataset, c: f64) -> Dataset {
    ds.with_response(ds.y().iter().map(|v| v * c).collect())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ic_is_affine_in_rss_and_linear_in_sigma2(
        rss in 0.0f64..1e4, rank in 1usize..20, s2 in 1e-3f64..1e3, c in 0.1f64..10.0,
    ) {
        let n = 200;
        let fit = |rss: f64| pindex_core::FitSummary {
            rss, rank, coefficients: vec![], fitted: vec![0.0; n], sigma_hat2: 0.0,
        };
        let cfg = IcConfig { lambda_n: 1.3, d: 0.2, sigma_mode: SigmaMode::Estimated };
        let base = ic_value(&fit(rss), n, &cfg, s2).unwrap();
        let shifted = ic_value(&fit(rss + 5.0), n, &cfg, s2).unwrap();
        prop_assert!((shifted - base - 5.0).abs() <= 1e-9 * (1.0 + base.abs()));
        let at_zero = ic_value(&fit(0.0), n, &cfg, s2).unwrap();
        let at_zero_c = ic_value(&fit(0.0), n, &cfg, c * s2).unwrap();
        prop_assert!((at_zero_c - c * at_zero).abs() <= 1e-9 * (1.0 + at_zero_c.abs()));
    }

    #[test]
    fn bic_choice_and_pi_invariant_to_response_scale(seed in any::<u64>(), c in 1e-3f64..1e3) {
        let ds = random_subset_dataset(seed, 80, 6);
        let family = build_family(FamilyConfig::all_subset(6)).unwrap();
        let cfg = IcConfig::default();
        let a = select_best(&ds, &family, Criterion::Bic).unwrap();
        let ds2 = scaled(&ds, c);
        let b = select_best(&ds2, &family, Criterion::Bic).unwrap();
        prop_assert_eq!(&a.model, &b.model);
        let pa = compute_pi(&ds, &a, &family, &cfg, None).unwrap().pi;
        let pb = compute_pi(&ds2, &b, &family, &cfg, None).unwrap().pi;
        prop_assert!((pa - pb).abs() <= 1e-8 * pa.abs());
    }

    #[test]
    fn nested_pi_invariant_to_affine_reparameterization(
        seed in any::<u64>(), shift in -1.0f64..1.0, stretch in 0.5f64..2.0,
    ) {
        // span{1, x, …, x^m} equals span{1, (a + bx), …, (a + bx)^m}.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = normals(&mut rng, 100);
        let e = normals(&mut rng, 100);
        let y: Vec<f64> = x.iter().zip(&e).map(|(v, e)| 1.0 - v + 0.5 * v * v + e).collect();
        let x2: Vec<f64> = x.iter().map(|v| shift + stretch * v).collect();
        let family = build_family(FamilyConfig::nested(5)).unwrap();
        let cfg = IcConfig::default();
        let d1 = polynomial_dataset(&x, y.clone(), 5).unwrap();
        let d2 = polynomial_dataset(&x2, y, 5).unwrap();
        let s1 = select_best(&d1, &family, Criterion::Bic).unwrap();
        let s2 = select_best(&d2, &family, Criterion::Bic).unwrap();
        prop_assert_eq!(&s1.model, &s2.model);
        let p1 = compute_pi(&d1, &s1, &family, &cfg, None).unwrap().pi;
        let p2 = compute_pi(&d2, &s2, &family, &cfg, None).unwrap().pi;
        prop_assert!((p1 - p2).abs() <= 1e-8 * p1.abs());
    }
}
