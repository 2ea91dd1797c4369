//! Coverage of naive confidence intervals computed after selection.

use pindex_core::linalg::ols_inference;
use pindex_core::{build_family, select_best, Criterion, Family, ModelSpec};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dgp::{generate_dataset, Dgp};
use crate::error::{parameter, Result};
use crate::replicate::{
    check_failures, par_map, replication_seed, ReplicationFailure, StudyConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCoverage {
    /// Predictor index (1-based).
    pub term: usize,
    pub label: String,
    pub beta: f64,
    /// Replications whose selected model contained the term.
    pub selected: usize,
    pub covered: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub dgp: Dgp,
    pub level: f64,
    pub reps: usize,
    pub seed: u64,
    /// Intervals from the true model instead of the BIC choice.
    pub oracle: bool,
    pub completed: usize,
    pub failures: Vec<ReplicationFailure>,
    pub coefficients: Vec<CoefficientCoverage>,
    /// Covered intervals over all (replication, nonzero coefficient) pairs.
    pub overall: f64,
}

/// For each replication, selects by BIC (or takes the true model in oracle
/// mode), forms t-intervals as if the model had been fixed in advance and
/// records whether each nonzero true coefficient is covered. A coefficient
/// whose term was not selected is estimated as 0 and counts as not covered.
pub fn coverage_study(
    dgp: &Dgp,
    level: f64,
    reps: usize,
    cfg: &StudyConfig,
    seed: u64,
    oracle: bool,
) -> Result<CoverageReport> {
    if !(level > 0.0 && level < 1.0) {
        return Err(parameter(format!("level must lie in (0, 1), got {level}")));
    }
    if reps == 0 {
        return Err(parameter("reps must be at least 1"));
    }
    dgp.validate()?;
    let beta = dgp.true_coefficients().ok_or_else(|| {
        parameter(format!(
            "{} has no finite coefficient vector to cover",
            dgp.kind
        ))
    })?;
    let true_model = dgp.true_model().expect("finite truth implies a true model");
    let targets: Vec<usize> = (1..=beta.len()).filter(|j| beta[j - 1] != 0.0).collect();
    if targets.is_empty() {
        return Err(parameter("the true model has no nonzero coefficient"));
    }
    let family = build_family(dgp.family_config())?;
    let outcomes = par_map(cfg.threads, reps, |rep| {
        let s = replication_seed(seed, rep);
        one(dgp, &family, &true_model, &targets, &beta, level, oracle, s)
            .map_err(|e| ReplicationFailure::new(rep, s, &e))
    })?;
    let mut hits = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(h) => hits.push(h),
            Err(f) => failures.push(f),
        }
    }
    check_failures(&failures, reps)?;
    let done = hits.len();
    let labels = dgp.predictor_labels();
    let coefficients: Vec<CoefficientCoverage> = targets
        .iter()
        .enumerate()
        .map(|(i, &term)| {
            let selected = hits.iter().filter(|h| h[i].0).count();
            let covered = hits.iter().filter(|h| h[i].1).count();
            CoefficientCoverage {
                term,
                label: labels[term - 1].clone(),
                beta: beta[term - 1],
                selected,
                covered,
                coverage: covered as f64 / done.max(1) as f64,
            }
        })
        .collect();
    let total: usize = coefficients.iter().map(|c| c.covered).sum();
    Ok(CoverageReport {
        dgp: dgp.clone(),
        level,
        reps,
        seed,
        oracle,
        completed: done,
        failures,
        overall: total as f64 / (done * targets.len()).max(1) as f64,
        coefficients,
    })
}

/// `(selected, covered)` for each target term.
#[allow(clippy::too_many_arguments)]
fn one(
    dgp: &Dgp,
    family: &Family,
    true_model: &ModelSpec,
    targets: &[usize],
    beta: &[f64],
    level: f64,
    oracle: bool,
    seed: u64,
) -> pindex_core::Result<Vec<(bool, bool)>> {
    let ds = generate_dataset(dgp, seed)?;
    let model = if oracle {
        true_model.clone()
    } else {
        select_best(&ds, family, Criterion::Bic)?.model
    };
    let inf = ols_inference(&ds, &model)?;
    let t = StudentsT::new(0.0, 1.0, inf.df as f64)
        .map_err(|e| pindex_core::Error::Parameter(e.to_string()))?;
    let q = t.inverse_cdf(0.5 + level / 2.0);
    let columns: Vec<usize> = model.columns().collect();
    Ok(targets
        .iter()
        .map(|&term| match columns.iter().position(|&c| c == term) {
            Some(i) => {
                let est = inf.fit.coefficients[i];
                (true, (est - beta[term - 1]).abs() <= q * inf.std_errors[i])
            }
            None => (false, false),
        })
        .collect())
}
