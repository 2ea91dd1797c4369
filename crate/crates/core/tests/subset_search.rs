mod common;

use std::collections::HashSet;

use common::{brute_force_best, mask_columns, mask_terms, normal_equations, random_subset_dataset};
use pindex_core::subset_search::{best_rss_per_size_traced, SearchMethod};
use pindex_core::{
    best_rss_per_size, build_family, select_best, Criterion, FamilyConfig, ModelSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_against_brute_force(seed: u64, n: usize, p: usize) -> Result<(), String> {
    let ds = random_subset_dataset(seed, n, p);
    let family = build_family(FamilyConfig::all_subset(p)).unwrap();
    let got = best_rss_per_size(&ds, &family).unwrap();
    let want = brute_force_best(&ds);
    if got.stats.method != SearchMethod::BranchAndBound {
        return Err("expected branch and bound on a full-rank design".into());
    }
    for b in &got.per_size {
        let (mask, rss) = want[b.size];
        if (b.rss - rss).abs() > 1e-9 * rss {
            return Err(format!("size {}: rss {} vs oracle {}", b.size, b.rss, rss));
        }
        if b.model != ModelSpec::subset(mask_terms(mask), true) {
            return Err(format!(
                "size {}: model {} differs from oracle",
                b.size, b.model
            ));
        }
    }
    Ok(())
}

#[test]
fn matches_brute_force_on_fifty_datasets_with_eight_predictors() {
    for seed in 0..50 {
        check_against_brute_force(seed, 60, 8).unwrap();
    }
}

#[test]
fn bic_selection_matches_scan_of_all_1023_subsets() {
    let p = 10;
    for seed in 100..110 {
        let ds = random_subset_dataset(seed, 80, p);
        let n = ds.n() as f64;
        let family = build_family(FamilyConfig::all_subset(p)).unwrap();
        let got = select_best(&ds, &family, Criterion::Bic).unwrap();
        let mut scanned = 0;
        let mut best = (f64::INFINITY, 0u64);
        for mask in 1u64..(1 << p) {
            scanned += 1;
            let (_, rss) = normal_equations(ds.y(), &mask_columns(&ds, mask));
            let score = n * (rss / n).ln() + n.ln() * (mask.count_ones() + 1) as f64;
            if score < best.0 {
                best = (score, mask);
            }
        }
        assert_eq!(scanned, 1023);
        assert_eq!(got.model, ModelSpec::subset(mask_terms(best.1), true));
        assert!((got.score - best.0).abs() < 1e-8 * best.0.abs());
    }
}

#[test]
fn bounds_are_sound_for_sampled_completions() {
    let p = 9;
    let ds = random_subset_dataset(7, 50, p);
    let family = build_family(FamilyConfig::all_subset(p)).unwrap();
    let (_, trace) = best_rss_per_size_traced(&ds, &family).unwrap();
    assert!(!trace.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let full = (1u64 << p) - 1;
    for node in &trace {
        assert_eq!(node.forced_in & node.forced_out, 0);
        let open = full & !node.forced_in & !node.forced_out;
        for _ in 0..4 {
            let pick: u64 = rng.random::<u64>() & open;
            let mask = node.forced_in | pick;
            if mask == 0 {
                continue;
            }
            let (_, rss) = normal_equations(ds.y(), &mask_columns(&ds, mask));
            assert!(
                rss >= node.bound_rss * (1.0 - 1e-9),
                "completion {mask:#b} has rss {rss} below bound {}",
                node.bound_rss
            );
        }
    }
}

#[test]
fn prunes_relative_to_exhaustive() {
    let p = 16;
    let ds = random_subset_dataset(3, 200, p);
    let family = build_family(FamilyConfig::all_subset(p)).unwrap();
    let got = best_rss_per_size(&ds, &family).unwrap();
    assert!(got.stats.nodes < got.stats.exhaustive);
}

#[test]
fn family_enumerates_every_nonempty_mask() {
    let family = build_family(FamilyConfig::all_subset(8)).unwrap();
    assert_eq!(family.len(), 255);
    let models: HashSet<ModelSpec> = family.models().collect();
    assert_eq!(models.len(), 255);
    let want: HashSet<ModelSpec> = (1u64..256)
        .map(|m| ModelSpec::subset(mask_terms(m), true))
        .collect();
    assert_eq!(models, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_for_up_to_twelve_predictors(seed in any::<u64>(), p in 2usize..=12) {
        let n = 3 * p + 10 + (seed % 20) as usize;
        prop_assert_eq!(check_against_brute_force(seed, n, p), Ok(()));
    }
}
