//! Index behaviour on subsamples of one dataset.

use pindex_core::{Dataset, Family};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{parameter, Result};
use crate::replicate::{
    analyze, check_failures, par_map, replication_seed, ReplicationFailure, SelectionMethod,
    StudyConfig,
};
use crate::stats::{frequency_table, FrequencyRow, Percentiles};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleCurve {
    pub size: usize,
    pub completed: usize,
    pub failures: Vec<ReplicationFailure>,
    pub pi: Option<Percentiles>,
    pub selection_frequency: Vec<FrequencyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleReport {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub method: SelectionMethod,
    pub curves: Vec<SubsampleCurve>,
    pub warnings: Vec<String>,
}

/// Draws `reps` subsamples without replacement at each size and reruns the
/// pipeline. Repetition `r` at size `m` uses stream `m` of seed `seed + r`.
pub fn subsample_study(
    dataset: &Dataset,
    family: &Family,
    method: SelectionMethod,
    sizes: &[usize],
    reps: usize,
    cfg: &StudyConfig,
    seed: u64,
) -> Result<SubsampleReport> {
    let n = dataset.n();
    if reps == 0 {
        return Err(parameter("reps must be at least 1"));
    }
    if sizes.is_empty() {
        return Err(parameter("at least one subsample size is required"));
    }
    let bad: Vec<String> = sizes
        .iter()
        .filter(|&&m| m >= n)
        .map(|m| m.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(parameter(format!(
            "subsample sizes must be below n = {n}, got {}",
            bad.join(", ")
        )));
    }
    let mut warnings = Vec::new();
    let mut unique: Vec<usize> = Vec::with_capacity(sizes.len());
    for &m in sizes {
        if unique.contains(&m) {
            warnings.push(format!("duplicate subsample size {m} ignored"));
        } else {
            unique.push(m);
        }
    }
    let mut curves = Vec::with_capacity(unique.len());
    for &m in &unique {
        let outcomes = par_map(cfg.threads, reps, |r| {
            let s = replication_seed(seed, r);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            rng.set_stream(m as u64);
            let mut rows = sample(&mut rng, n, m).into_vec();
            rows.sort_unstable();
            dataset
                .select_rows(&rows)
                .and_then(|ds| analyze(&ds, family, method, cfg))
                .map(|a| (a.selected.model.label(), a.pi.pi))
                .map_err(|e| ReplicationFailure::new(r, s, &e))
        })?;
        let mut done = Vec::with_capacity(reps);
        let mut failures = Vec::new();
        for o in outcomes {
            match o {
                Ok(v) => done.push(v),
                Err(f) => failures.push(f),
            }
        }
        check_failures(&failures, reps)?;
        curves.push(SubsampleCurve {
            size: m,
            completed: done.len(),
            pi: Percentiles::of(done.iter().map(|d| d.1)),
            selection_frequency: frequency_table(done.iter().map(|d| d.0.as_str())),
            failures,
        });
    }
    Ok(SubsampleReport {
        n,
        reps,
        seed,
        method,
        curves,
        warnings,
    })
}
