//! Risk (total square error) of AIC, BIC and the adaptive rule on shared data.

use pindex_core::{adaptive_select, build_family, least_squares_fit, tse, Criterion};
use serde::{Deserialize, Serialize};

use crate::dgp::{generate_dataset, Dgp};
use crate::error::{parameter, Result};
use crate::replicate::{
    check_failures, par_map, replication_seed, ReplicationFailure, StudyConfig,
};
use crate::stats::MeanSe;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskRecord {
    pub aic: f64,
    pub bic: f64,
    pub adaptive: f64,
    pub oracle: Option<f64>,
    pub pi: f64,
    pub chose_aic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub dgp: Dgp,
    pub reps: usize,
    pub seed: u64,
    pub config: StudyConfig,
    pub completed: usize,
    pub failures: Vec<ReplicationFailure>,
    pub aic: MeanSe,
    pub bic: MeanSe,
    pub adaptive: MeanSe,
    /// Risk of the least-squares fit of the true model, when it is a candidate.
    pub oracle: Option<MeanSe>,
    /// Replications where the adaptive rule took the AIC choice.
    pub adaptive_chose_aic: usize,
}

impl RiskReport {
    /// Adaptive risk over the smaller of the AIC and BIC risks.
    pub fn adaptive_ratio(&self) -> f64 {
        self.adaptive.mean / self.aic.mean.min(self.bic.mean)
    }
}

pub fn risk_comparison(dgp: &Dgp, reps: usize, cfg: &StudyConfig, seed: u64) -> Result<RiskReport> {
    if reps == 0 {
        return Err(parameter("reps must be at least 1"));
    }
    dgp.validate()?;
    cfg.ic.validate(dgp.n)?;
    let family = build_family(dgp.family_config())?;
    let true_model = dgp.true_model();
    let outcomes = par_map(cfg.threads, reps, |rep| {
        let s = replication_seed(seed, rep);
        let run = || -> pindex_core::Result<RiskRecord> {
            let ds = generate_dataset(dgp, s)?;
            let f = &ds.truth().expect("simulated data carries its truth").mean;
            let a = adaptive_select(&ds, &family, &cfg.ic, cfg.cutoff)?;
            let oracle = match &true_model {
                Some(m) => Some(tse(f, &least_squares_fit(&ds, m)?)?),
                None => None,
            };
            Ok(RiskRecord {
                aic: tse(f, &a.aic.fit)?,
                bic: tse(f, &a.bic.fit)?,
                adaptive: tse(f, &a.selected().fit)?,
                oracle,
                pi: a.pi.pi,
                chose_aic: a.chosen == Criterion::Aic,
            })
        };
        run().map_err(|e| ReplicationFailure::new(rep, s, &e))
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
    let col = |g: fn(&RiskRecord) -> f64| -> MeanSe {
        MeanSe::of(&records.iter().map(g).collect::<Vec<_>>()).expect("at least one record")
    };
    let oracle: Vec<f64> = records.iter().filter_map(|r| r.oracle).collect();
    Ok(RiskReport {
        dgp: dgp.clone(),
        reps,
        seed,
        config: cfg.clone(),
        completed: records.len(),
        aic: col(|r| r.aic),
        bic: col(|r| r.bic),
        adaptive: col(|r| r.adaptive),
        oracle: MeanSe::of(&oracle),
        adaptive_chose_aic: records.iter().filter(|r| r.chose_aic).count(),
        failures,
    })
}
