//! CSV input and output.

use std::path::Path;

use pindex_core::model_space::polynomial_dataset;
use pindex_core::{Dataset, FamilyKind};

use crate::error::{CliError, Result};

/// Header plus numeric rows of a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Splits off the response. Subset families take every other column as a
    /// predictor; nested families need exactly one predictor and expand it
    /// into powers up to `max_order`.
    pub fn to_dataset(
        &self,
        response: &str,
        kind: FamilyKind,
        max_order: usize,
    ) -> Result<Dataset> {
        let r = self
            .headers
            .iter()
            .position(|h| h == response)
            .ok_or_else(|| {
                CliError::Data(format!(
                    "response column '{response}' not found; columns: {}",
                    self.headers.join(", ")
                ))
            })?;
        let y = self.column(r);
        let others: Vec<usize> = (0..self.headers.len()).filter(|&j| j != r).collect();
        match kind {
            FamilyKind::AllSubset => {
                if others.is_empty() {
                    return Err(CliError::Data(
                        "no predictor columns besides the response".into(),
                    ));
                }
                let preds = others.iter().map(|&j| self.column(j)).collect();
                let labels = others.iter().map(|&j| self.headers[j].clone()).collect();
                Ok(Dataset::from_predictors(y, preds, labels)?)
            }
            FamilyKind::Nested => {
                if others.len() != 1 {
                    return Err(CliError::Data(format!(
                        "polynomial order selection needs exactly one predictor column, found {}",
                        others.len()
                    )));
                }
                Ok(polynomial_dataset(&self.column(others[0]), y, max_order)?)
            }
        }
    }
}

/// Reads a comma-separated file with a header row. Blank lines are skipped;
/// ragged rows and non-numeric cells are reported with their line numbers.
pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(CliError::Data(format!("{}: empty file", path.display())));
    }
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != headers.len() {
            problems.push(format!(
                "line {line}: expected {} fields, found {}",
                headers.len(),
                rec.len()
            ));
            continue;
        }
        let mut row = Vec::with_capacity(rec.len());
        for (j, cell) in rec.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => problems.push(format!(
                    "line {line}, column '{}': '{cell}' is not a finite number",
                    headers[j]
                )),
            }
        }
        if row.len() == headers.len() {
            rows.push(row);
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Data(format!(
            "{}: {}",
            path.display(),
            problems.join("; ")
        )));
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(Table { headers, rows })
}

/// Reads a CSV file and uses every non-response column as a candidate predictor.
pub fn ingest_csv(path: &Path, response: &str) -> Result<Dataset> {
    read_table(path)?.to_dataset(response, FamilyKind::AllSubset, 1)
}

/// Writes the response and the predictor columns (not the constant column)
/// so that reading the file back reproduces the dataset. Polynomial designs
/// are written as their single predictor `x`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn dataset_to_csv(dataset: &Dataset, response: &str, kind: FamilyKind) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let design = dataset.design();
    let mut header = vec![response.to_string()];
    let p = match kind {
        FamilyKind::AllSubset => {
            header.extend(design.labels()[1..].iter().cloned());
            dataset.predictor_count()
        }
        FamilyKind::Nested => {
            header.push("x".into());
            1
        }
    };
    w.write_record(&header)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for i in 0..dataset.n() {
        let mut rec = vec![dataset.y()[i].to_string()];
        rec.extend((1..=p).map(|j| design.column(j)[i].to_string()));
        w.write_record(&rec)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}
