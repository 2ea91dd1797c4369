//! Behaviour of the index and the oracle conditions as the sample grows.

use pindex_core::{build_family, oracle_conditions, ConditionDiagnostics};
use serde::{Deserialize, Serialize};

use crate::dgp::{generate_dataset, Dgp};
use crate::error::{parameter, Result};
use crate::replicate::{run_replications, SelectionMethod, StudyConfig};
use crate::stats::Percentiles;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub n: usize,
    pub completed: usize,
    pub pi: Option<Percentiles>,
}

/// Index percentiles of the same process at each sample size.
pub fn pi_trend(
    dgp: &Dgp,
    sizes: &[usize],
    reps: usize,
    method: SelectionMethod,
    cfg: &StudyConfig,
    seed: u64,
) -> Result<Vec<TrendPoint>> {
    sizes
        .iter()
        .map(|&n| {
            let s = run_replications(&dgp.clone().with_n(n), reps, method, cfg, seed)?;
            Ok(TrendPoint {
                n,
                completed: s.records.len(),
                pi: s.pi,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionPoint {
    pub n: usize,
    pub diagnostics: ConditionDiagnostics,
}

/// Oracle condition quantities on one dataset per sample size, at the
/// process's own noise variance, for ranks `1..=max_rank`.
pub fn condition_trend(
    dgp: &Dgp,
    sizes: &[usize],
    max_rank: usize,
    cfg: &StudyConfig,
    seed: u64,
) -> Result<Vec<ConditionPoint>> {
    let sigma2 = dgp.sigma * dgp.sigma;
    if sigma2 <= 0.0 {
        return Err(parameter("condition quantities need sigma > 0"));
    }
    let family = build_family(dgp.family_config())?;
    sizes
        .iter()
        .map(|&n| {
            let ds = generate_dataset(&dgp.clone().with_n(n), seed)?;
            let diagnostics = oracle_conditions(&ds, &family, &cfg.ic, sigma2, 1..=max_rank)?;
            Ok(ConditionPoint { n, diagnostics })
        })
        .collect()
}
