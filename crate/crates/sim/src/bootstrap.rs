//! Parametric bootstrap from a selected model.

use pindex_core::{compute_pi, select_best, Criterion, Dataset, Family, SelectionResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{parameter, Result};
use crate::replicate::{
    check_failures, par_map, replication_seed, ReplicationFailure, StudyConfig,
};
use crate::stats::{frequency_table, FrequencyRow, Percentiles};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    pub resample: usize,
    pub seed: u64,
    pub model: String,
    /// Absent when the index is undefined for the resample (zero residual variance).
    pub pi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub original: String,
    pub criterion: Criterion,
    pub sigma_hat: f64,
    pub resamples: usize,
    pub seed: u64,
    pub outcomes: Vec<BootstrapOutcome>,
    pub failures: Vec<ReplicationFailure>,
    /// Share of completed resamples that selected the original model again.
    pub reselection_frequency: Option<f64>,
    pub selection_frequency: Vec<FrequencyRow>,
    pub pi: Option<Percentiles>,
}

/// Draws `Y* = Ŷ + σ̂ ε*` from the selected fit `b` times and reruns selection
/// (same criterion) and the index on each resample. Only a failed selection
/// counts as a failed resample.
pub fn parametric_bootstrap(
    dataset: &Dataset,
    family: &Family,
    selected: &SelectionResult,
    b: usize,
    cfg: &StudyConfig,
    seed: u64,
) -> Result<BootstrapReport> {
    if b == 0 {
        return Err(parameter("the number of resamples must be at least 1"));
    }
    let fit = &selected.fit;
    if fit.fitted.len() != dataset.n() {
        return Err(parameter("selected fit does not belong to this dataset"));
    }
    let sigma_hat = fit.sigma_hat2.sqrt();
    let outcomes = par_map(cfg.threads, b, |r| {
        let s = replication_seed(seed, r);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let y: Vec<f64> = fit
            .fitted
            .iter()
            .map(|f| {
                let e: f64 = StandardNormal.sample(&mut rng);
                f + sigma_hat * e
            })
            .collect();
        let ds = dataset
            .with_response(y)
            .map_err(|e| ReplicationFailure::new(r, s, &e))?;
        let sel = select_best(&ds, family, selected.criterion)
            .map_err(|e| ReplicationFailure::new(r, s, &e))?;
        let pi = compute_pi(&ds, &sel, family, &cfg.ic, cfg.cutoff)
            .ok()
            .map(|p| p.pi);
        Ok(BootstrapOutcome {
            resample: r,
            seed: s,
            model: sel.model.label(),
            pi,
        })
    })?;
    let (ok, failures): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|o| o.is_ok());
    let outcomes: Vec<BootstrapOutcome> = ok.into_iter().map(|o| o.unwrap()).collect();
    let failures: Vec<ReplicationFailure> = failures.into_iter().map(|o| o.unwrap_err()).collect();
    check_failures(&failures, b)?;
    let original = selected.model.label();
    let done = outcomes.len();
    let again = outcomes.iter().filter(|o| o.model == original).count();
    Ok(BootstrapReport {
        reselection_frequency: (done > 0).then(|| again as f64 / done as f64),
        selection_frequency: frequency_table(outcomes.iter().map(|o| o.model.as_str())),
        pi: Percentiles::of(outcomes.iter().filter_map(|o| o.pi)),
        original,
        criterion: selected.criterion,
        sigma_hat,
        resamples: b,
        seed,
        outcomes,
        failures,
    })
}
