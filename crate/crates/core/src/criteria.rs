//! Information criteria.
//!
//! Two families live here. The penalized criterion
//!
//! ```text
//! IC(k) = RSS_k + λ_n log(n) r_k σ² − n σ² + d √n log(n) σ²
//! ```
//!
//! is evaluated at a caller-supplied reference variance and is only used to
//! form the parametricness index. Selection uses the σ-free profile forms
//! `n log(RSS/n) + penalty · r_k` with penalty `log n` (BIC) or `2` (AIC).
//! All logarithms are natural.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::FitSummary;
use crate::model_space::ModelSpec;

/// Relative tolerance under which two selection scores count as tied.
pub const SCORE_TIE_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SigmaMode {
    /// Noise variance known a priori.
    Known { sigma2: f64 },
    /// Noise variance estimated from the selected model.
    Estimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcConfig {
    pub lambda_n: f64,
    pub d: f64,
    pub sigma_mode: SigmaMode,
}

impl Default for IcConfig {
    /// `λ_n = 1`, `d = 0`, estimated σ.
    fn default() -> Self {
        Self {
            lambda_n: 1.0,
            d: 0.0,
            sigma_mode: SigmaMode::Estimated,
        }
    }
}

impl IcConfig {
    /// Validates against the sample size: `λ_n log n ≥ 1`, `d ≥ 0`, known `σ² > 0`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut problems = Vec::new();
        if !self.lambda_n.is_finite() || self.lambda_n <= 0.0 {
            problems.push(format!("lambda_n must be positive, got {}", self.lambda_n));
        } else if n >= 2 && self.lambda_n * (n as f64).ln() < 1.0 - 1e-12 {
            problems.push(format!(
                "lambda_n must be at least 1/log(n) = {:.6} for n = {n}, got {}",
                1.0 / (n as f64).ln(),
                self.lambda_n
            ));
        }
        if !self.d.is_finite() || self.d < 0.0 {
            problems.push(format!("d must be non-negative, got {}", self.d));
        }
        if let SigmaMode::Known { sigma2 } = self.sigma_mode {
            if !sigma2.is_finite() || sigma2 <= 0.0 {
                problems.push(format!("known sigma^2 must be positive, got {sigma2}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(problems.join("; ")))
        }
    }

    /// `(λ_n log n − 1) r + d √n log n`: the criterion per unit of reference variance,
    /// net of the residual term.
    pub fn penalty_units(&self, n: usize, rank: usize) -> f64 {
        let ln = (n as f64).ln();
        (self.lambda_n * ln - 1.0) * rank as f64 + self.d * (n as f64).sqrt() * ln
    }
}

/// `IC(k)` at reference variance `sigma2_ref`.
pub fn ic_value(fit: &FitSummary, n: usize, cfg: &IcConfig, sigma2_ref: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
    }
    if !(sigma2_ref.is_finite() && sigma2_ref > 0.0) {
        return Err(Error::Parameter(format!(
            "reference variance must be positive, got {sigma2_ref}"
        )));
    }
    let nf = n as f64;
    let ln = nf.ln();
    Ok(
        fit.rss + cfg.lambda_n * ln * fit.rank as f64 * sigma2_ref - nf * sigma2_ref
            + cfg.d * nf.sqrt() * ln * sigma2_ref,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Aic,
    Bic,
}

impl Criterion {
    pub fn penalty(self, n: usize) -> f64 {
        match self {
            Criterion::Aic => 2.0,
            Criterion::Bic => (n as f64).ln(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Aic => "aic",
            Criterion::Bic => "bic",
        }
    }
}

/// Profile score `n log(RSS/n) + penalty · r`. A perfect fit (`RSS = 0`)
/// scores `-∞`.
pub fn profile_score(criterion: Criterion, fit: &FitSummary, n: usize) -> Result<f64> {
    if n <= fit.rank {
        return Err(Error::Parameter(format!(
            "profile criterion needs n > rank, got n = {n}, rank = {}",
            fit.rank
        )));
    }
    if fit.rss <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let nf = n as f64;
    Ok(nf * (fit.rss / nf).ln() + criterion.penalty(n) * fit.rank as f64)
}

pub fn aic_score(fit: &FitSummary, n: usize) -> Result<f64> {
    profile_score(Criterion::Aic, fit, n)
}

pub fn bic_score(fit: &FitSummary, n: usize) -> Result<f64> {
    profile_score(Criterion::Bic, fit, n)
}

fn scores_tied(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= SCORE_TIE_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Selection order: lower score wins; near-equal scores fall back to the
/// smaller rank, then the smaller model by [`ModelSpec::tie_key`].
pub fn compare_candidates(
    (score_a, rank_a, model_a): (f64, usize, &ModelSpec),
    (score_b, rank_b, model_b): (f64, usize, &ModelSpec),
) -> Ordering {
    if !scores_tied(score_a, score_b) {
        return score_a.total_cmp(&score_b);
    }
    rank_a
        .cmp(&rank_b)
        .then_with(|| model_a.tie_key().cmp(&model_b.tie_key()))
}
