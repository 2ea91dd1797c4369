//! Seeded replication studies.

use pindex_core::{
    adaptive_select, build_family, compute_pi, select_best, tse, Criterion, Dataset, Family,
    IcConfig, PiReport, SelectionResult,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{generate_dataset, Dgp};
use crate::error::{Error, Result};
use crate::stats::{frequency_table, FrequencyRow, MeanSe, Percentiles};

/// Index settings shared by every study. The worker count only affects
/// speed, never results, and is not serialized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub ic: IcConfig,
    /// Classification cutoff; the family kind's default when absent.
    pub cutoff: Option<f64>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    Aic,
    Bic,
    /// AIC when the BIC choice's index is below the cutoff, BIC otherwise.
    Adaptive,
}

impl SelectionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::Aic => "aic",
            SelectionMethod::Bic => "bic",
            SelectionMethod::Adaptive => "adaptive",
        }
    }
}

/// Selection plus the index report for one dataset.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub selected: SelectionResult,
    /// Index of the selected model, or of the BIC choice for the adaptive rule.
    pub pi: PiReport,
}

pub fn analyze(
    dataset: &Dataset,
    family: &Family,
    method: SelectionMethod,
    cfg: &StudyConfig,
) -> pindex_core::Result<Analysis> {
    let single = |criterion| -> pindex_core::Result<Analysis> {
        let selected = select_best(dataset, family, criterion)?;
        let pi = compute_pi(dataset, &selected, family, &cfg.ic, cfg.cutoff)?;
        Ok(Analysis { selected, pi })
    };
    match method {
        SelectionMethod::Aic => single(Criterion::Aic),
        SelectionMethod::Bic => single(Criterion::Bic),
        SelectionMethod::Adaptive => {
            let a = adaptive_select(dataset, family, &cfg.ic, cfg.cutoff)?;
            let selected = a.selected().clone();
            Ok(Analysis { selected, pi: a.pi })
        }
    }
}

/// Runs `f(0..count)` in parallel and returns results in index order.
pub(crate) fn par_map<T, F>(threads: Option<usize>, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let run = || (0..count).into_par_iter().map(&f).collect();
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Runtime(e.to_string()))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Seed of replication `rep`.
pub fn replication_seed(base_seed: u64, rep: usize) -> u64 {
    base_seed.wrapping_add(rep as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub rep: usize,
    pub seed: u64,
    pub model: String,
    /// Polynomial order (nested) or number of terms (subsets).
    pub order: usize,
    pub rank: usize,
    pub pi: f64,
    pub sigma_hat: f64,
    pub tse: f64,
    pub parametric: bool,
    pub criterion: Criterion,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationFailure {
    pub rep: usize,
    pub seed: u64,
    pub category: String,
    pub message: String,
}

impl ReplicationFailure {
    pub(crate) fn new(rep: usize, seed: u64, e: &pindex_core::Error) -> Self {
        Self {
            rep,
            seed,
            category: e.category().into(),
            message: e.to_string(),
        }
    }
}

/// Fails the study when more than 5% of `reps` failed.
pub(crate) fn check_failures(failures: &[ReplicationFailure], reps: usize) -> Result<()> {
    if failures.len() * 20 > reps {
        return Err(Error::Study {
            failed: failures.len(),
            reps,
            first: failures[0].message.clone(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub dgp: Dgp,
    pub method: SelectionMethod,
    pub reps: usize,
    pub base_seed: u64,
    pub config: StudyConfig,
    pub records: Vec<ReplicationRecord>,
    pub failures: Vec<ReplicationFailure>,
    pub pi: Option<Percentiles>,
    pub order: Option<Percentiles>,
    pub sigma_hat: Option<Percentiles>,
    pub selection_frequency: Vec<FrequencyRow>,
    pub true_model: Option<String>,
    /// Share of completed replications that selected the true model.
    pub true_model_proportion: Option<f64>,
    /// Share of completed replications classified as practically parametric.
    pub parametric_proportion: Option<f64>,
    pub tse: Option<MeanSe>,
}

impl SimSummary {
    pub fn median_pi(&self) -> Option<f64> {
        self.pi.as_ref().map(|p| p.p50)
    }
}

fn one_replication(
    dgp: &Dgp,
    family: &Family,
    method: SelectionMethod,
    cfg: &StudyConfig,
    rep: usize,
    seed: u64,
) -> pindex_core::Result<ReplicationRecord> {
    let ds = generate_dataset(dgp, seed)?;
    let a = analyze(&ds, family, method, cfg)?;
    let truth = ds.truth().expect("simulated data carries its truth");
    Ok(ReplicationRecord {
        rep,
        seed,
        model: a.selected.model.label(),
        order: a.selected.model.size(),
        rank: a.selected.fit.rank,
        pi: a.pi.pi,
        sigma_hat: a.selected.fit.sigma_hat2.sqrt(),
        tse: tse(&truth.mean, &a.selected.fit)?,
        parametric: a.pi.classification == pindex_core::Classification::PracticallyParametric,
        criterion: a.selected.criterion,
        degenerate: a.pi.degenerate,
    })
}

/// Replication `r` uses seed `base_seed + r`, so results do not depend on
/// scheduling or worker count.
pub fn run_replications(
    dgp: &Dgp,
    reps: usize,
    method: SelectionMethod,
    cfg: &StudyConfig,
    base_seed: u64,
) -> Result<SimSummary> {
    if reps == 0 {
        return Err(crate::error::parameter("reps must be at least 1"));
    }
    dgp.validate()?;
    cfg.ic.validate(dgp.n)?;
    let family = build_family(dgp.family_config())?;
    let outcomes = par_map(cfg.threads, reps, |rep| {
        let seed = replication_seed(base_seed, rep);
        one_replication(dgp, &family, method, cfg, rep, seed)
            .map_err(|e| ReplicationFailure::new(rep, seed, &e))
    })?;
    let mut records = Vec::with_capacity(reps);
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
    check_failures(&failures, reps)?;
    Ok(summarize(
        dgp.clone(),
        method,
        reps,
        base_seed,
        cfg.clone(),
        records,
        failures,
    ))
}

fn summarize(
    dgp: Dgp,
    method: SelectionMethod,
    reps: usize,
    base_seed: u64,
    config: StudyConfig,
    records: Vec<ReplicationRecord>,
    failures: Vec<ReplicationFailure>,
) -> SimSummary {
    let done = records.len();
    let share = |k: usize| (done > 0).then(|| k as f64 / done as f64);
    let true_model = dgp.true_model().map(|m| m.label());
    let true_model_proportion = true_model
        .as_ref()
        .and_then(|t| share(records.iter().filter(|r| &r.model == t).count()));
    let tses: Vec<f64> = records.iter().map(|r| r.tse).collect();
    SimSummary {
        pi: Percentiles::of(records.iter().map(|r| r.pi)),
        order: Percentiles::of(records.iter().map(|r| r.order as f64)),
        sigma_hat: Percentiles::of(records.iter().map(|r| r.sigma_hat)),
        selection_frequency: frequency_table(records.iter().map(|r| r.model.as_str())),
        true_model_proportion,
        parametric_proportion: share(records.iter().filter(|r| r.parametric).count()),
        tse: MeanSe::of(&tses),
        true_model,
        dgp,
        method,
        reps,
        base_seed,
        config,
        records,
        failures,
    }
}
