//! Parametricness index, classification, the adaptive AIC/BIC rule and the
//! oracle condition quantities used in simulation diagnostics.
//!
//! The index compares the criterion of the selected model `k̂` with that of
//! its best one-rank-less sub-model:
//!
//! ```text
//! PI = min_{k ∈ S_1(k̂)} IC(k) / IC(k̂)     if r_k̂ > 1
//! PI = n                                   if r_k̂ = 1
//! ```
//!
//! In estimated-σ mode every IC is evaluated at the σ̂² of the selected model.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criteria::{ic_value, Criterion, IcConfig, SigmaMode};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{least_squares_fit, oracle_residual_norm};
use crate::model_space::{one_less_fits, Family, FamilyKind, ModelSpec};
use crate::subset_search::{best_rss_per_size, pick_best, selection_candidates, SelectionResult};

/// Default cutoff for nested (order-selection) families.
pub const NESTED_CUTOFF: f64 = 1.6;
/// Default cutoff for all-subset families.
pub const SUBSET_CUTOFF: f64 = 1.2;

pub fn default_cutoff(kind: FamilyKind) -> f64 {
    match kind {
        FamilyKind::Nested => NESTED_CUTOFF,
        FamilyKind::AllSubset => SUBSET_CUTOFF,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    PracticallyParametric,
    PracticallyNonparametric,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::PracticallyParametric => "practically_parametric",
            Classification::PracticallyNonparametric => "practically_nonparametric",
        }
    }
}

/// Parametric iff `pi ≥ cutoff` (boundary inclusive). `cutoff` defaults to
/// the family kind's value.
pub fn classify(pi: f64, kind: FamilyKind, cutoff: Option<f64>) -> Classification {
    if pi >= cutoff.unwrap_or_else(|| default_cutoff(kind)) {
        Classification::PracticallyParametric
    } else {
        Classification::PracticallyNonparametric
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmodelIc {
    pub model: ModelSpec,
    pub rank: usize,
    pub rss: f64,
    pub ic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiReport {
    pub pi: f64,
    pub n: usize,
    pub selected: ModelSpec,
    pub selected_rank: usize,
    pub ic_selected: f64,
    pub submodel_ics: Vec<SubmodelIc>,
    pub argmin_submodel: Option<ModelSpec>,
    pub sigma_mode: SigmaMode,
    /// Variance at which every IC was evaluated.
    pub sigma2_ref: f64,
    pub classification: Classification,
    pub cutoff_used: f64,
    /// True when the selected model has rank 1 and `pi = n` by convention.
    pub rank_one_convention: bool,
    /// True when `IC(k̂) ≤ 0` (known-σ mode); `pi` is then a ratio of
    /// absolute values and should not be trusted.
    pub degenerate: bool,
}

/// Parametricness index of a selected model.
pub fn compute_pi(
    dataset: &Dataset,
    selected: &SelectionResult,
    family: &Family,
    cfg: &IcConfig,
    cutoff: Option<f64>,
) -> Result<PiReport> {
    let n = dataset.n();
    cfg.validate(n)?;
    let cutoff_used = cutoff.unwrap_or_else(|| default_cutoff(family.kind()));
    let fit = &selected.fit;
    let rank = fit.rank;
    let sigma2_ref = match cfg.sigma_mode {
        SigmaMode::Known { sigma2 } => sigma2,
        SigmaMode::Estimated => {
            if n <= rank {
                return Err(Error::Parameter(format!(
                    "estimated sigma needs n > rank, got n = {n}, rank = {rank}"
                )));
            }
            if fit.sigma_hat2 <= 0.0 {
                return Err(Error::Diagnostic(
                    "selected model fits exactly; sigma-hat is zero".into(),
                ));
            }
            fit.sigma_hat2
        }
    };
    let ic_selected = ic_value(fit, n, cfg, sigma2_ref)?;

    if rank <= 1 {
        let pi = n as f64;
        return Ok(PiReport {
            pi,
            n,
            selected: selected.model.clone(),
            selected_rank: rank,
            ic_selected,
            submodel_ics: Vec::new(),
            argmin_submodel: None,
            sigma_mode: cfg.sigma_mode,
            sigma2_ref,
            classification: classify(pi, family.kind(), Some(cutoff_used)),
            cutoff_used,
            rank_one_convention: true,
            degenerate: false,
        });
    }

    let subs = one_less_fits(&selected.model, rank, dataset, family)?;
    if subs.is_empty() {
        return Err(Error::Diagnostic(format!(
            "no one-rank-less sub-model of {} (rank {rank}) exists on this design",
            selected.model
        )));
    }
    let degenerate = ic_selected <= 0.0;
    let mut submodel_ics = Vec::with_capacity(subs.len());
    let mut best: Option<(f64, usize)> = None;
    for (i, (model, sub_fit)) in subs.into_iter().enumerate() {
        let ic = ic_value(&sub_fit, n, cfg, sigma2_ref)?;
        let ratio = if degenerate {
            (ic / ic_selected).abs()
        } else {
            ic / ic_selected
        };
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, i));
        }
        submodel_ics.push(SubmodelIc {
            model,
            rank: sub_fit.rank,
            rss: sub_fit.rss,
            ic,
        });
    }
    let (pi, arg) = best.expect("non-empty sub-model list");
    Ok(PiReport {
        pi,
        n,
        selected: selected.model.clone(),
        selected_rank: rank,
        ic_selected,
        argmin_submodel: Some(submodel_ics[arg].model.clone()),
        submodel_ics,
        sigma_mode: cfg.sigma_mode,
        sigma2_ref,
        classification: classify(pi, family.kind(), Some(cutoff_used)),
        cutoff_used,
        rank_one_convention: false,
        degenerate,
    })
}

/// Both candidate selections, the index of the BIC choice and the model the
/// adaptive rule returns (AIC below the cutoff, BIC at or above it).
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSelection {
    pub aic: SelectionResult,
    pub bic: SelectionResult,
    pub pi: PiReport,
    pub chosen: Criterion,
}

impl AdaptiveSelection {
    pub fn selected(&self) -> &SelectionResult {
        match self.chosen {
            Criterion::Aic => &self.aic,
            Criterion::Bic => &self.bic,
        }
    }
}

pub fn adaptive_select(
    dataset: &Dataset,
    family: &Family,
    cfg: &IcConfig,
    cutoff: Option<f64>,
) -> Result<AdaptiveSelection> {
    let cands = selection_candidates(dataset, family)?;
    let aic = pick_best(&cands, dataset.n(), Criterion::Aic)?;
    let bic = pick_best(&cands, dataset.n(), Criterion::Bic)?;
    let pi = compute_pi(dataset, &bic, family, cfg, cutoff)?;
    let chosen = if pi.pi >= pi.cutoff_used {
        Criterion::Bic
    } else {
        Criterion::Aic
    };
    Ok(AdaptiveSelection {
        aic,
        bic,
        pi,
        chosen,
    })
}

/// Condition quantities computable only when the truth is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionDiagnostics {
    /// Smallest scaled approximation error over the one-less sub-models of
    /// the true model; absent when the truth is not a candidate.
    pub a_n: Option<f64>,
    /// Known-σ per-rank quantity, keyed by rank `j`.
    pub b_jn: BTreeMap<usize, f64>,
    /// Estimated-σ per-rank quantity, keyed by rank `j`.
    pub e_jn: BTreeMap<usize, f64>,
}

/// Smallest `‖(I − M_k) f‖²` among models of each rank, using the family's
/// own search machinery with the truth in place of the response.
fn min_approximation_error_by_rank(
    dataset: &Dataset,
    family: &Family,
    truth_fn: &[f64],
) -> Result<BTreeMap<usize, f64>> {
    let oracle_ds = dataset.with_response(truth_fn.to_vec())?;
    let mut models = vec![family.floor_model()];
    match family.kind() {
        FamilyKind::Nested => models.extend(family.models()),
        FamilyKind::AllSubset => models.extend(
            best_rss_per_size(&oracle_ds, family)?
                .per_size
                .into_iter()
                .map(|b| b.model),
        ),
    }
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for m in models {
        let fit = least_squares_fit(&oracle_ds, &m)?;
        let e = out.entry(fit.rank).or_insert(f64::INFINITY);
        *e = e.min(fit.rss);
    }
    Ok(out)
}

/// `A_n`, `B_{j,n}` and `E_{j,n}` for the ranks in `ranks` (entries for
/// unachievable ranks, or `j ≥ n`, are omitted).
///
/// For all-subset families the per-rank infimum is taken over the size
/// champions of a best-subset search on the truth, which is exact when the
/// design has full column rank.
pub fn oracle_conditions(
    dataset: &Dataset,
    family: &Family,
    cfg: &IcConfig,
    sigma2: f64,
    ranks: std::ops::RangeInclusive<usize>,
) -> Result<ConditionDiagnostics> {
    let truth = dataset
        .truth()
        .ok_or_else(|| Error::Data("oracle conditions need a dataset with known truth".into()))?;
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Parameter(format!(
            "sigma^2 must be positive, got {sigma2}"
        )));
    }
    let n = dataset.n();
    cfg.validate(n)?;
    let f = &truth.mean;

    let a_n = match &truth.model {
        Some(true_model) if family.kind() == true_model.family => {
            let rank = crate::linalg::model_rank(dataset, true_model)?;
            let subs = one_less_fits(true_model, rank, dataset, family)?;
            let mut best: Option<f64> = None;
            for (m, _) in subs {
                let a = oracle_residual_norm(f, &m, dataset)? / sigma2;
                best = Some(best.map_or(a, |b| b.min(a)));
            }
            best
        }
        _ => None,
    };

    let approx = min_approximation_error_by_rank(dataset, family, f)?;
    let nf = n as f64;
    let ln = nf.ln();
    let extra = cfg.d * nf.sqrt() * ln;
    let mut b_jn = BTreeMap::new();
    let mut e_jn = BTreeMap::new();
    for j in ranks {
        if j >= n {
            continue;
        }
        let Some(&err) = approx.get(&j) else {
            continue;
        };
        let base = (cfg.lambda_n * ln - 1.0) * j as f64 + extra;
        b_jn.insert(j, base + err / sigma2);
        // The infimum over models of rank j: the first factor does not depend
        // on the model, so it sits at the smallest error when non-negative.
        // With a negative factor it would sit at the largest error instead,
        // which the per-rank minimum does not track.
        if base >= 0.0 {
            e_jn.insert(j, base * (1.0 + err / ((nf - j as f64) * sigma2)));
        }
    }
    Ok(ConditionDiagnostics { a_n, b_jn, e_jn })
}
