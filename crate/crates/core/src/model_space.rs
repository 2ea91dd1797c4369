//! Candidate families and one-rank-less sub-models.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, DesignMatrix};
use crate::error::{Error, Result};
use crate::linalg::{least_squares_fit, FitSummary};

/// Largest predictor count accepted for all-subset families (subset masks are `u64`).
pub const MAX_SUBSET_PREDICTORS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Polynomial / series order selection: model `m` uses terms `1..=m`.
    Nested,
    /// All non-empty subsets of the predictors.
    AllSubset,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Nested => "nested",
            FamilyKind::AllSubset => "subset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterceptPolicy {
    /// The constant column is in every model and never dropped.
    Always,
    /// The constant column is an ordinary candidate term (all-subset families only).
    Selectable,
}

/// One candidate model: a set of predictor terms (1-based, matching design
/// columns) plus whether the constant column is included.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: FamilyKind,
    pub terms: Vec<usize>,
    pub intercept: bool,
}

impl ModelSpec {
    /// Polynomial order `order`: terms `1..=order` plus the constant.
    pub fn nested(order: usize) -> Self {
        Self {
            family: FamilyKind::Nested,
            terms: (1..=order).collect(),
            intercept: true,
        }
    }

    /// A subset model; terms are sorted and deduplicated.
    pub fn subset(mut terms: Vec<usize>, intercept: bool) -> Self {
        terms.sort_unstable();
        terms.dedup();
        Self {
            family: FamilyKind::AllSubset,
            terms,
            intercept,
        }
    }

    pub fn intercept_only(family: FamilyKind) -> Self {
        Self {
            family,
            terms: Vec::new(),
            intercept: true,
        }
    }

    /// Design column indices, constant column first.
    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.intercept
            .then_some(0)
            .into_iter()
            .chain(self.terms.iter().copied())
    }

    pub fn column_count(&self) -> usize {
        self.terms.len() + usize::from(self.intercept)
    }

    /// Number of predictor terms; the polynomial order for nested models.
    pub fn size(&self) -> usize {
        self.terms.len()
    }

    /// Ordering used for deterministic tie-breaking among equal scores:
    /// fewer columns first, then the lexicographically smallest term set.
    pub fn tie_key(&self) -> (usize, &[usize], bool) {
        (self.column_count(), &self.terms, !self.intercept)
    }

    /// Compact label: `"order 4"` for nested models, predictor codes such as
    /// `"125"` or `"1259ABCEG"` for subsets (1–9 then A, B, ...).
    pub fn label(&self) -> String {
        match self.family {
            FamilyKind::Nested => format!("order {}", self.terms.len()),
            FamilyKind::AllSubset => {
                if self.terms.is_empty() {
                    return if self.intercept {
                        "(intercept)".into()
                    } else {
                        "(empty)".into()
                    };
                }
                let mut s: String = self.terms.iter().map(|&t| term_code(t)).collect();
                if !self.intercept {
                    s.push_str(" (no intercept)");
                }
                s
            }
        }
    }
}

/// Single-character code of predictor `j` (1-based): `1`–`9`, then `A`–`Z`, then `a`–`z`.
pub fn term_code(j: usize) -> char {
    match j {
        1..=9 => char::from(b'0' + j as u8),
        10..=35 => char::from(b'A' + (j - 10) as u8),
        36..=61 => char::from(b'a' + (j - 36) as u8),
        _ => '?',
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    /// Maximum order for nested families, predictor count for all-subset families.
    pub size: usize,
    pub intercept: InterceptPolicy,
}

impl FamilyConfig {
    pub fn nested(max_order: usize) -> Self {
        Self {
            kind: FamilyKind::Nested,
            size: max_order,
            intercept: InterceptPolicy::Always,
        }
    }

    pub fn all_subset(predictor_count: usize) -> Self {
        Self {
            kind: FamilyKind::AllSubset,
            size: predictor_count,
            intercept: InterceptPolicy::Always,
        }
    }
}

/// Immutable handle on a candidate family Γ; models are enumerated lazily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    config: FamilyConfig,
}

pub fn build_family(config: FamilyConfig) -> Result<Family> {
    match config.kind {
        FamilyKind::Nested => {
            if config.size < 1 {
                return Err(Error::Parameter("max_order must be at least 1".into()));
            }
            if config.intercept == InterceptPolicy::Selectable {
                return Err(Error::Parameter(
                    "a selectable intercept is only supported for all-subset families".into(),
                ));
            }
        }
        FamilyKind::AllSubset => {
            if config.size < 1 {
                return Err(Error::Parameter(
                    "predictor_count must be at least 1".into(),
                ));
            }
            if config.size > MAX_SUBSET_PREDICTORS {
                return Err(Error::Parameter(format!(
                    "predictor_count {} exceeds the limit of {MAX_SUBSET_PREDICTORS}",
                    config.size
                )));
            }
        }
    }
    Ok(Family { config })
}

impl Family {
    pub fn config(&self) -> FamilyConfig {
        self.config
    }

    pub fn kind(&self) -> FamilyKind {
        self.config.kind
    }

    pub fn size(&self) -> usize {
        self.config.size
    }

    pub fn intercept_policy(&self) -> InterceptPolicy {
        self.config.intercept
    }

    /// Number of free (droppable) terms: predictors, plus the constant when selectable.
    pub(crate) fn free_terms(&self) -> usize {
        self.config.size + usize::from(self.config.intercept == InterceptPolicy::Selectable)
    }

    /// Number of selectable models.
    pub fn len(&self) -> u64 {
        match self.config.kind {
            FamilyKind::Nested => self.config.size as u64,
            FamilyKind::AllSubset => {
                let q = self.free_terms();
                if q >= 64 {
                    u64::MAX
                } else {
                    (1u64 << q) - 1
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The rank-1 floor: the constant-only model. It is never selected but
    /// serves as the one-less sub-model of single-term models.
    pub fn floor_model(&self) -> ModelSpec {
        ModelSpec::intercept_only(self.config.kind)
    }

    /// Decodes a subset mask over the free terms.
    pub(crate) fn model_from_mask(&self, mask: u64) -> ModelSpec {
        match self.config.intercept {
            InterceptPolicy::Always => ModelSpec::subset(
                (0..self.config.size)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| b + 1)
                    .collect(),
                true,
            ),
            InterceptPolicy::Selectable => ModelSpec::subset(
                (1..=self.config.size)
                    .filter(|&b| mask >> b & 1 == 1)
                    .collect(),
                mask & 1 == 1,
            ),
        }
    }

    /// Lazy enumeration of Γ: orders `1..=max` for nested families, subset
    /// masks in increasing order for all-subset families.
    pub fn models(&self) -> Box<dyn Iterator<Item = ModelSpec> + '_> {
        match self.config.kind {
            FamilyKind::Nested => Box::new((1..=self.config.size).map(ModelSpec::nested)),
            FamilyKind::AllSubset => Box::new((1..=self.len()).map(|m| self.model_from_mask(m))),
        }
    }

    pub fn contains(&self, model: &ModelSpec) -> bool {
        if model.family != self.config.kind {
            return false;
        }
        let in_range = model
            .terms
            .iter()
            .all(|&t| (1..=self.config.size).contains(&t));
        let sorted = model.terms.windows(2).all(|w| w[0] < w[1]);
        match self.config.kind {
            FamilyKind::Nested => {
                model.intercept
                    && !model.terms.is_empty()
                    && in_range
                    && model.terms.iter().enumerate().all(|(i, &t)| t == i + 1)
            }
            FamilyKind::AllSubset => {
                let intercept_ok =
                    model.intercept || self.config.intercept == InterceptPolicy::Selectable;
                in_range
                    && sorted
                    && intercept_ok
                    && model.column_count() > 0
                    && !(model.terms.is_empty() && self.config.intercept == InterceptPolicy::Always)
            }
        }
    }

    /// Checks that the dataset has enough predictor columns for the family.
    pub fn check_dataset(&self, dataset: &Dataset) -> Result<()> {
        if dataset.predictor_count() < self.config.size {
            return Err(Error::Parameter(format!(
                "family needs {} predictor columns, dataset has {}",
                self.config.size,
                dataset.predictor_count()
            )));
        }
        Ok(())
    }

    /// Nominal one-less candidates before the rank check.
    fn one_less_candidates(&self, model: &ModelSpec) -> Vec<ModelSpec> {
        match self.config.kind {
            FamilyKind::Nested => match model.terms.len() {
                0 => Vec::new(),
                m => vec![if m == 1 {
                    self.floor_model()
                } else {
                    ModelSpec::nested(m - 1)
                }],
            },
            FamilyKind::AllSubset => {
                let mut out: Vec<ModelSpec> = (0..model.terms.len())
                    .map(|i| {
                        let mut terms = model.terms.clone();
                        terms.remove(i);
                        ModelSpec::subset(terms, model.intercept)
                    })
                    .collect();
                if model.intercept && self.config.intercept == InterceptPolicy::Selectable {
                    out.push(ModelSpec::subset(model.terms.clone(), false));
                }
                out.retain(|m| m.column_count() > 0);
                out
            }
        }
    }
}

/// `S_1(k)` with fits: every sub-model whose realized rank is exactly
/// `rank − 1`. Candidates whose rank does not drop by one are excluded.
pub(crate) fn one_less_fits(
    model: &ModelSpec,
    rank: usize,
    dataset: &Dataset,
    family: &Family,
) -> Result<Vec<(ModelSpec, FitSummary)>> {
    if rank <= 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for cand in family.one_less_candidates(model) {
        let fit = least_squares_fit(dataset, &cand)?;
        if fit.rank + 1 == rank {
            out.push((cand, fit));
        }
    }
    Ok(out)
}

/// `S_1(k)`: sub-models of `model` in the family whose realized rank on the
/// dataset's design is exactly one less than the model's.
pub fn submodels_one_less(
    model: &ModelSpec,
    dataset: &Dataset,
    family: &Family,
) -> Result<Vec<ModelSpec>> {
    let rank = crate::linalg::model_rank(dataset, model)?;
    Ok(one_less_fits(model, rank, dataset, family)?
        .into_iter()
        .map(|(m, _)| m)
        .collect())
}

/// Raw monomial design `[1, x, x², …, x^max_order]`, labels `"x^j"` after the intercept.
pub fn build_polynomial_design(x: &[f64], max_order: usize) -> Result<DesignMatrix> {
    if max_order < 1 {
        return Err(Error::Parameter("max_order must be at least 1".into()));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!("non-finite x at row {i}")));
    }
    let mut columns = Vec::with_capacity(max_order + 1);
    columns.push(vec![1.0; x.len()]);
    for j in 1..=max_order {
        let next: Vec<f64> = columns[j - 1].iter().zip(x).map(|(p, xi)| p * xi).collect();
        columns.push(next);
    }
    let labels = std::iter::once(crate::data::INTERCEPT_LABEL.to_string())
        .chain((1..=max_order).map(|j| format!("x^{j}")))
        .collect();
    DesignMatrix::new(x.len(), columns, labels)
}

/// Dataset for polynomial order selection on a single predictor.
pub fn polynomial_dataset(x: &[f64], y: Vec<f64>, max_order: usize) -> Result<Dataset> {
    Dataset::new(y, build_polynomial_design(x, max_order)?)
}
