//! Design matrices and datasets.
//!
//! A [`Dataset`] always carries a constant column at position 0 of its
//! design; predictor `j` (1-based) lives in design column `j`. Whether a
//! candidate model actually uses the constant column is decided by the
//! model, not by the data.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_space::ModelSpec;

/// Column-major real matrix with per-column labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    n: usize,
    columns: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(n: usize, columns: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if columns.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} columns but {} labels",
                columns.len(),
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for (label, col) in labels.iter().zip(&columns) {
            if !seen.insert(label.as_str()) {
                return Err(Error::Data(format!("duplicate column label {label:?}")));
            }
            if col.len() != n {
                return Err(Error::Data(format!(
                    "column {label:?} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "column {label:?} has a non-finite value at row {i}"
                )));
            }
        }
        Ok(Self { n, columns, labels })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            n: rows.len(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Known data-generating truth, available only for simulated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    /// Mean function evaluated at the design points.
    pub mean: Vec<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// The true model when it is one of the candidates.
    pub model: Option<ModelSpec>,
    /// True coefficient of every predictor column (index `j - 1` for predictor `j`),
    /// when the truth is a finite linear combination of the predictors.
    pub coefficients: Option<Vec<f64>>,
}

/// Response plus design (constant column first) plus optional truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    y: Vec<f64>,
    design: DesignMatrix,
    truth: Option<Truth>,
}

pub const INTERCEPT_LABEL: &str = "(Intercept)";

impl Dataset {
    /// Builds a dataset from a design whose column 0 is the constant column.
    pub fn new(y: Vec<f64>, design: DesignMatrix) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Data("empty response".into()));
        }
        if y.len() != design.nrows() {
            return Err(Error::Data(format!(
                "response has {} rows, design has {}",
                y.len(),
                design.nrows()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite response at row {i}")));
        }
        if design.ncols() == 0 || design.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::Data("design column 0 must be the constant 1".into()));
        }
        Ok(Self {
            y,
            design,
            truth: None,
        })
    }

    /// Builds a dataset from predictor columns, prepending the constant column.
    pub fn from_predictors(
        y: Vec<f64>,
        predictors: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let n = y.len();
        let mut columns = Vec::with_capacity(predictors.len() + 1);
        columns.push(vec![1.0; n]);
        columns.extend(predictors);
        let mut all_labels = Vec::with_capacity(labels.len() + 1);
        all_labels.push(INTERCEPT_LABEL.to_string());
        all_labels.extend(labels);
        Self::new(y, DesignMatrix::new(n, columns, all_labels)?)
    }

    pub fn with_truth(mut self, truth: Truth) -> Result<Self> {
        if truth.mean.len() != self.n() {
            return Err(Error::Data(format!(
                "truth has {} rows, data has {}",
                truth.mean.len(),
                self.n()
            )));
        }
        if let Some(beta) = &truth.coefficients {
            if beta.len() != self.predictor_count() {
                return Err(Error::Data(format!(
                    "{} true coefficients for {} predictors",
                    beta.len(),
                    self.predictor_count()
                )));
            }
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn truth(&self) -> Option<&Truth> {
        self.truth.as_ref()
    }

    /// Number of non-constant columns.
    pub fn predictor_count(&self) -> usize {
        self.design.ncols() - 1
    }

    /// Same design and truth with a different response.
    pub fn with_response(&self, y: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(y, self.design.clone())?;
        out.truth = self.truth.clone();
        Ok(out)
    }

    /// Keeps only the listed rows (in the given order), truth included.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Data(format!("row {bad} out of range")));
        }
        let truth = self.truth.as_ref().map(|t| Truth {
            mean: rows.iter().map(|&i| t.mean[i]).collect(),
            ..t.clone()
        });
        Ok(Self {
            y: rows.iter().map(|&i| self.y[i]).collect(),
            design: self.design.select_rows(rows),
            truth,
        })
    }
}
