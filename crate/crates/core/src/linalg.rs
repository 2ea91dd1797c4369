//! Rank-revealing least squares.
//!
//! Every fit goes through a column-pivoted Householder QR of the model's
//! columns. Columns are equilibrated to unit Euclidean norm before
//! factorization; this leaves the column span (and therefore the projection,
//! the fitted values and the residual sum of squares) unchanged, and keeps
//! raw monomial designs of high order factorizable. The normal equations
//! are never formed.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model_space::ModelSpec;

/// Least-squares output for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    /// Residual sum of squares `‖Y − Ŷ‖²`.
    pub rss: f64,
    /// Rank of the projection onto the model's column span.
    pub rank: usize,
    /// Minimum-norm coefficients, one per model column (in model column order).
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    /// `rss / (n − rank)`, or 0 when `rank == n`.
    pub sigma_hat2: f64,
}

impl FitSummary {
    pub fn n(&self) -> usize {
        self.fitted.len()
    }
}

/// Column-pivoted Householder QR of equilibrated columns.
pub(crate) struct PivotedQr {
    /// Reduced columns in pivot order; rows `0..rank` hold R.
    cols: Vec<Vec<f64>>,
    /// Householder vectors `v_k` (acting on rows `k..n`) with `2 / (v·v)`.
    reflectors: Vec<(Vec<f64>, f64)>,
    /// `perm[j]` is the original index of pivoted column `j`.
    perm: Vec<usize>,
    /// Original norm of each original column (1 for zero columns).
    scale: Vec<f64>,
    rank: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

impl PivotedQr {
    pub(crate) fn new(n: usize, columns: &[&[f64]]) -> Self {
        let m = columns.len();
        let mut scale = Vec::with_capacity(m);
        let mut cols: Vec<Vec<f64>> = columns
            .iter()
            .map(|c| {
                let s = norm2(c).sqrt();
                let s = if s > 0.0 { s } else { 1.0 };
                scale.push(s);
                c.iter().map(|v| v / s).collect()
            })
            .collect();
        let mut perm: Vec<usize> = (0..m).collect();
        let max_norm = cols.iter().map(|c| norm2(c).sqrt()).fold(0.0_f64, f64::max);
        let tol = (n.max(m) as f64) * f64::EPSILON * max_norm;

        let mut reflectors = Vec::new();
        let mut rank = 0;
        for k in 0..n.min(m) {
            let (best, best_norm) =
                (k..m)
                    .map(|j| (j, norm2(&cols[j][k..]).sqrt()))
                    .fold(
                        (k, -1.0),
                        |acc, (j, v)| if v > acc.1 { (j, v) } else { acc },
                    );
            if best_norm <= tol {
                break;
            }
            cols.swap(k, best);
            perm.swap(k, best);

            let x0 = cols[k][k];
            let alpha = if x0 >= 0.0 { -best_norm } else { best_norm };
            let mut v = cols[k][k..].to_vec();
            v[0] -= alpha;
            let vv = norm2(&v);
            let beta = if vv > 0.0 { 2.0 / vv } else { 0.0 };
            cols[k][k] = alpha;
            for e in cols[k][k + 1..].iter_mut() {
                *e = 0.0;
            }
            for col in cols.iter_mut().skip(k + 1) {
                let s = beta * dot(&v, &col[k..]);
                if s != 0.0 {
                    for (c, vi) in col[k..].iter_mut().zip(&v) {
                        *c -= s * vi;
                    }
                }
            }
            reflectors.push((v, beta));
            rank += 1;
        }
        Self {
            cols,
            reflectors,
            perm,
            scale,
            rank,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rank
    }

    /// `Qᵀ y`.
    fn qt(&self, y: &[f64]) -> Vec<f64> {
        let mut z = y.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            let s = beta * dot(v, &z[k..]);
            for (zi, vi) in z[k..].iter_mut().zip(v) {
                *zi -= s * vi;
            }
        }
        z
    }

    /// `Q w` for `w` supported on the first `rank` coordinates.
    fn q(&self, mut w: Vec<f64>) -> Vec<f64> {
        for (k, (v, beta)) in self.reflectors.iter().enumerate().rev() {
            let s = beta * dot(v, &w[k..]);
            for (wi, vi) in w[k..].iter_mut().zip(v) {
                *wi -= s * vi;
            }
        }
        w
    }

    /// R in the original column scaling: `rank` rows by `m` columns, row-major,
    /// columns in pivot order.
    fn r_unscaled(&self) -> Vec<Vec<f64>> {
        (0..self.rank)
            .map(|i| {
                self.cols
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c[i] * self.scale[self.perm[j]])
                    .collect()
            })
            .collect()
    }

    /// Minimum-norm solution of `min ‖X b − y‖` given `c = (Qᵀy)[..rank]`,
    /// via a complete orthogonal decomposition of the trapezoidal factor.
    fn min_norm_coefficients(&self, c: &[f64]) -> Vec<f64> {
        let m = self.cols.len();
        let r = self.rank;
        let mut t = self.r_unscaled();
        // Right Householder transforms zeroing the trailing block R12.
        let mut right: Vec<(Vec<f64>, f64)> = Vec::with_capacity(r);
        if r < m {
            for i in (0..r).rev() {
                let mut x = Vec::with_capacity(1 + m - r);
                x.push(t[i][i]);
                x.extend_from_slice(&t[i][r..]);
                let nx = norm2(&x).sqrt();
                let alpha = if x[0] >= 0.0 { -nx } else { nx };
                let mut v = x;
                v[0] -= alpha;
                let vv = norm2(&v);
                let beta = if vv > 0.0 { 2.0 / vv } else { 0.0 };
                for row in t.iter_mut().take(i + 1) {
                    let mut s = v[0] * row[i];
                    for (vi, a) in v[1..].iter().zip(&row[r..]) {
                        s += vi * a;
                    }
                    s *= beta;
                    row[i] -= s * v[0];
                    for (a, vi) in row[r..].iter_mut().zip(&v[1..]) {
                        *a -= s * vi;
                    }
                }
                right.push((v, beta));
            }
            right.reverse();
        }
        // Back substitution with the leading triangle.
        let mut w = vec![0.0; m];
        for i in (0..r).rev() {
            let mut s = c[i];
            for j in i + 1..r {
                s -= t[i][j] * w[j];
            }
            w[i] = s / t[i][i];
        }
        // Undo the right transforms: apply H_0 first, then H_1, ...
        for (i, (v, beta)) in right.iter().enumerate() {
            let mut s = v[0] * w[i];
            for (vi, a) in v[1..].iter().zip(&w[r..]) {
                s += vi * a;
            }
            s *= beta;
            w[i] -= s * v[0];
            for (a, vi) in w[r..].iter_mut().zip(&v[1..]) {
                *a -= s * vi;
            }
        }
        let mut out = vec![0.0; m];
        for (j, &orig) in self.perm.iter().enumerate() {
            out[orig] = w[j];
        }
        out
    }

    /// Diagonal of `(XᵀX)⁻¹` in original column order; full rank only.
    fn inverse_gram_diagonal(&self) -> Option<Vec<f64>> {
        let m = self.cols.len();
        if self.rank < m {
            return None;
        }
        let r = self.r_unscaled();
        // Rinv by back substitution, column by column.
        let mut rinv = vec![vec![0.0; m]; m];
        for j in 0..m {
            rinv[j][j] = 1.0 / r[j][j];
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in i + 1..=j {
                    s += r[i][k] * rinv[k][j];
                }
                rinv[i][j] = -s / r[i][i];
            }
        }
        let mut out = vec![0.0; m];
        for (j, &orig) in self.perm.iter().enumerate() {
            out[orig] = norm2(&rinv[j]);
        }
        Some(out)
    }
}

/// Residual sums of squares below this fraction of `‖y‖²` are rounding
/// error and are reported as an exact fit (`rss = 0`).
pub const EXACT_FIT_RTOL: f64 = 1e-24;

/// Fits `y` on an arbitrary list of columns.
pub fn fit_columns(y: &[f64], columns: &[&[f64]]) -> Result<FitSummary> {
    let n = y.len();
    if n == 0 {
        return Err(Error::Data("empty response".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite response value".into()));
    }
    for (j, c) in columns.iter().enumerate() {
        if c.len() != n {
            return Err(Error::Data(format!(
                "column {j} has {} rows, expected {n}",
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("column {j} has a non-finite value")));
        }
    }
    if columns.is_empty() {
        let rss = norm2(y);
        return Ok(FitSummary {
            rss,
            rank: 0,
            coefficients: Vec::new(),
            fitted: vec![0.0; n],
            sigma_hat2: rss / n as f64,
        });
    }
    let qr = PivotedQr::new(n, columns);
    let rank = qr.rank();
    let z = qr.qt(y);
    let mut rss: f64 = z[rank..].iter().map(|v| v * v).sum();
    if rss <= EXACT_FIT_RTOL * norm2(y) {
        rss = 0.0;
    }
    let mut w = z.clone();
    for e in w[rank..].iter_mut() {
        *e = 0.0;
    }
    let fitted = qr.q(w);
    let coefficients = qr.min_norm_coefficients(&z[..rank]);
    let sigma_hat2 = if rank < n {
        rss / (n - rank) as f64
    } else {
        0.0
    };
    Ok(FitSummary {
        rss,
        rank,
        coefficients,
        fitted,
        sigma_hat2,
    })
}

/// Numerical rank of a column set.
pub fn column_rank(n: usize, columns: &[&[f64]]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    PivotedQr::new(n, columns).rank()
}

fn model_columns<'a>(dataset: &'a Dataset, model: &ModelSpec) -> Result<Vec<&'a [f64]>> {
    let ncols = dataset.design().ncols();
    model
        .columns()
        .map(|j| {
            if j < ncols {
                Ok(dataset.design().column(j))
            } else {
                Err(Error::Data(format!(
                    "model {model} references term {j}, but the design has {} predictors",
                    ncols - 1
                )))
            }
        })
        .collect()
}

/// Least-squares fit of the dataset's response on the model's columns.
pub fn least_squares_fit(dataset: &Dataset, model: &ModelSpec) -> Result<FitSummary> {
    let cols = model_columns(dataset, model)?;
    fit_columns(dataset.y(), &cols)
}

/// Projection rank `r_k` of a model on the dataset's design.
pub fn model_rank(dataset: &Dataset, model: &ModelSpec) -> Result<usize> {
    let cols = model_columns(dataset, model)?;
    Ok(column_rank(dataset.n(), &cols))
}

/// `‖(I − M_k) f‖²`: squared distance from `truth_fn` to the model span.
pub fn oracle_residual_norm(truth_fn: &[f64], model: &ModelSpec, dataset: &Dataset) -> Result<f64> {
    if truth_fn.len() != dataset.n() {
        return Err(Error::Data(format!(
            "truth has {} rows, data has {}",
            truth_fn.len(),
            dataset.n()
        )));
    }
    let cols = model_columns(dataset, model)?;
    Ok(fit_columns(truth_fn, &cols)?.rss)
}

/// Total square error `‖f − Ŷ‖²`.
pub fn tse(truth_fn: &[f64], fit: &FitSummary) -> Result<f64> {
    if truth_fn.len() != fit.fitted.len() {
        return Err(Error::Data(format!(
            "truth has {} rows, fit has {}",
            truth_fn.len(),
            fit.fitted.len()
        )));
    }
    Ok(truth_fn
        .iter()
        .zip(&fit.fitted)
        .map(|(f, y)| (f - y) * (f - y))
        .sum())
}

/// Classical OLS inference for a full-rank model treated as fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsInference {
    pub fit: FitSummary,
    /// Standard error of each coefficient, in model column order.
    pub std_errors: Vec<f64>,
    /// Residual degrees of freedom `n − rank`.
    pub df: usize,
}

pub fn ols_inference(dataset: &Dataset, model: &ModelSpec) -> Result<OlsInference> {
    let cols = model_columns(dataset, model)?;
    let fit = fit_columns(dataset.y(), &cols)?;
    let n = dataset.n();
    if fit.rank < cols.len() || fit.rank >= n {
        return Err(Error::Data(format!(
            "model {model} is not estimable: rank {} with {} columns and {n} rows",
            fit.rank,
            cols.len()
        )));
    }
    let qr = PivotedQr::new(n, &cols);
    let diag = qr
        .inverse_gram_diagonal()
        .ok_or_else(|| Error::Data(format!("model {model} is rank deficient")))?;
    let std_errors = diag.iter().map(|d| (fit.sigma_hat2 * d).sqrt()).collect();
    Ok(OlsInference {
        df: n - fit.rank,
        fit,
        std_errors,
    })
}
