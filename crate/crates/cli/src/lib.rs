//! Command-line driver: CSV ingestion, configuration validation, study
//! execution and JSON/CSV report emission.
//!
//! Every report is a JSON envelope carrying a schema version, the echoed
//! configuration (everything except the worker count) and the command's
//! result; `schema/report.schema.json` describes it.

pub mod args;
pub mod error;
pub mod ingest;

use std::fs;
use std::path::Path;

use pindex_core::linalg::ols_inference;
use pindex_core::subset_search::{pick_best, selection_candidates};
use pindex_core::{
    adaptive_select, aic_score, bic_score, build_family, compute_pi, Criterion, Dataset, Family,
    FamilyConfig, FamilyKind, InterceptPolicy, PiReport, SelectionResult, SigmaMode,
};
use pindex_sim::output::{percentile_curves_csv, records_csv, to_json};
use pindex_sim::{
    coverage_study, generate_dataset, parametric_bootstrap, risk_comparison, run_replications,
    subsample_study, SelectionMethod, StudyConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, CommandKind, RunConfig, Source};
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// The report schema shipped with the crate.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Serialize)]
struct Echo<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    response: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a pindex_sim::Dgp>,
    family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_order: Option<usize>,
    intercept: &'static str,
    lambda: f64,
    d: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    cutoff: f64,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reps: Option<usize>,
    seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<f64>,
    oracle: bool,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    schema_version: &'static str,
    tool: &'static str,
    tool_version: &'static str,
    command: CommandKind,
    config: Echo<'a>,
    result: Value,
}

fn echo(cfg: &RunConfig) -> Echo<'_> {
    let (data, response, preset) = match &cfg.source {
        Source::Csv { path, response } => (
            Some(path.display().to_string()),
            Some(response.as_str()),
            None,
        ),
        Source::Preset(d) => (None, None, Some(d)),
    };
    Echo {
        data,
        response,
        preset,
        family: cfg.family.as_str(),
        max_order: (cfg.family == FamilyKind::Nested).then_some(cfg.max_order),
        intercept: match cfg.intercept {
            InterceptPolicy::Always => "always",
            InterceptPolicy::Selectable => "selectable",
        },
        lambda: cfg.ic.lambda_n,
        d: cfg.ic.d,
        sigma: match cfg.ic.sigma_mode {
            SigmaMode::Known { sigma2 } => Some(sigma2.sqrt()),
            SigmaMode::Estimated => None,
        },
        cutoff: cfg.cutoff_used(),
        method: match cfg.command {
            CommandKind::Risk => "all",
            _ => cfg.method.as_str(),
        },
        reps: cfg.reps,
        seed: cfg.seed,
        sizes: cfg.sizes.clone(),
        level: cfg.level,
        oracle: cfg.oracle,
    }
}

/// Validates and runs a command. Writes any requested files and returns the
/// JSON report text.
pub fn execute(command: &Command) -> Result<String> {
    let (kind, args) = command.parts();
    let cfg = args::validate(kind, args)?;
    let result = match kind {
        CommandKind::Fit => fit(&cfg)?,
        CommandKind::Pi => pi(&cfg)?,
        CommandKind::Simulate => simulate(&cfg)?,
        CommandKind::Bootstrap => bootstrap(&cfg)?,
        CommandKind::Subsample => subsample(&cfg)?,
        CommandKind::Coverage => coverage(&cfg)?,
        CommandKind::Risk => risk(&cfg)?,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "pindex",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: kind,
        config: echo(&cfg),
        result,
    };
    let text = to_json(&report)?;
    if let Some(path) = &cfg.out {
        write(path, &text)?;
    }
    Ok(text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn study_config(cfg: &RunConfig) -> StudyConfig {
    StudyConfig {
        ic: cfg.ic,
        cutoff: Some(cfg.cutoff_used()),
        threads: cfg.threads,
    }
}

fn preset(cfg: &RunConfig) -> &pindex_sim::Dgp {
    match &cfg.source {
        Source::Preset(d) => d,
        Source::Csv { .. } => unreachable!("validated as a preset command"),
    }
}

/// Dataset and candidate family of a run.
fn load(cfg: &RunConfig) -> Result<(Dataset, Family)> {
    let (ds, family) = match &cfg.source {
        Source::Csv { path, response } => {
            let ds = ingest::read_table(path)?.to_dataset(response, cfg.family, cfg.max_order)?;
            let size = match cfg.family {
                FamilyKind::Nested => cfg.max_order,
                FamilyKind::AllSubset => ds.predictor_count(),
            };
            let family = build_family(FamilyConfig {
                kind: cfg.family,
                size,
                intercept: cfg.intercept,
            })?;
            (ds, family)
        }
        Source::Preset(dgp) => {
            let ds = generate_dataset(dgp, cfg.seed)?;
            if let Some(path) = &cfg.save_data {
                write(path, &ingest::dataset_to_csv(&ds, "y", cfg.family)?)?;
            }
            (ds, build_family(dgp.family_config())?)
        }
    };
    cfg.ic.validate(ds.n())?;
    Ok((ds, family))
}

fn term_labels(ds: &Dataset, sel: &SelectionResult) -> Vec<String> {
    let labels = ds.design().labels();
    sel.model.columns().map(|c| labels[c].clone()).collect()
}

fn model_json(ds: &Dataset, sel: &SelectionResult) -> Value {
    json!({
        "label": sel.model.label(),
        "terms": sel.model.terms,
        "intercept": sel.model.intercept,
        "columns": term_labels(ds, sel),
        "size": sel.model.size(),
        "rank": sel.fit.rank,
        "rss": sel.fit.rss,
        "sigma_hat": sel.fit.sigma_hat2.sqrt(),
        "criterion": sel.criterion.as_str(),
        "score": sel.score,
    })
}

fn coefficients_json(ds: &Dataset, sel: &SelectionResult) -> Value {
    let names = term_labels(ds, sel);
    let se = ols_inference(ds, &sel.model).ok().map(|i| i.std_errors);
    Value::Array(
        names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                json!({
                    "column": name,
                    "estimate": sel.fit.coefficients[i],
                    "std_error": se.as_ref().map(|s| s[i]),
                })
            })
            .collect(),
    )
}

fn pi_json(ds: &Dataset, report: &PiReport) -> Value {
    let submodels: Vec<Value> = report
        .submodel_ics
        .iter()
        .map(|s| {
            json!({
                "label": s.model.label(),
                "rank": s.rank,
                "rss": s.rss,
                "ic": s.ic,
                "ratio": s.ic / report.ic_selected,
            })
        })
        .collect();
    let _ = ds;
    json!({
        "pi": report.pi,
        "classification": report.classification.as_str(),
        "cutoff": report.cutoff_used,
        "sigma_mode": match report.sigma_mode {
            SigmaMode::Known { .. } => "known",
            SigmaMode::Estimated => "estimated",
        },
        "sigma2_ref": report.sigma2_ref,
        "ic_selected": report.ic_selected,
        "argmin_submodel": report.argmin_submodel.as_ref().map(|m| m.label()),
        "rank_one_convention": report.rank_one_convention,
        "degenerate": report.degenerate,
        "submodels": submodels,
    })
}

/// Selection under the run's method; the adaptive rule also returns its index.
fn select(
    ds: &Dataset,
    family: &Family,
    cfg: &RunConfig,
) -> Result<(SelectionResult, Option<pindex_core::AdaptiveSelection>)> {
    Ok(match cfg.method {
        SelectionMethod::Aic => (pindex_core::select_best(ds, family, Criterion::Aic)?, None),
        SelectionMethod::Bic => (pindex_core::select_best(ds, family, Criterion::Bic)?, None),
        SelectionMethod::Adaptive => {
            let a = adaptive_select(ds, family, &cfg.ic, Some(cfg.cutoff_used()))?;
            (a.selected().clone(), Some(a))
        }
    })
}

fn adaptive_json(a: &pindex_core::AdaptiveSelection) -> Value {
    json!({
        "chosen": a.chosen.as_str(),
        "aic_model": a.aic.model.label(),
        "bic_model": a.bic.model.label(),
        "bic_pi": a.pi.pi,
    })
}

fn fit(cfg: &RunConfig) -> Result<Value> {
    let (ds, family) = load(cfg)?;
    let n = ds.n();
    let cands = selection_candidates(&ds, &family)?;
    let (sel, adaptive) = select(&ds, &family, cfg)?;
    let table: Vec<Value> = cands
        .iter()
        .map(|(m, f)| {
            let ok = f.rank > 0 && f.rank < n;
            json!({
                "label": m.label(),
                "size": m.size(),
                "rank": f.rank,
                "rss": f.rss,
                "aic": if ok { aic_score(f, n).ok() } else { None },
                "bic": if ok { bic_score(f, n).ok() } else { None },
            })
        })
        .collect();
    // Fail early with a selection error if no candidate is admissible.
    pick_best(&cands, n, Criterion::Bic)?;
    Ok(json!({
        "n": n,
        "predictors": ds.predictor_count(),
        "selected": model_json(&ds, &sel),
        "coefficients": coefficients_json(&ds, &sel),
        "candidates": table,
        "adaptive": adaptive.as_ref().map(adaptive_json),
    }))
}

fn pi(cfg: &RunConfig) -> Result<Value> {
    let (ds, family) = load(cfg)?;
    let (sel, adaptive) = select(&ds, &family, cfg)?;
    let report = match &adaptive {
        Some(a) => a.pi.clone(),
        None => compute_pi(&ds, &sel, &family, &cfg.ic, Some(cfg.cutoff_used()))?,
    };
    Ok(json!({
        "n": ds.n(),
        "predictors": ds.predictor_count(),
        "selected": model_json(&ds, &sel),
        "index_of": report.selected.label(),
        "index": pi_json(&ds, &report),
        "adaptive": adaptive.as_ref().map(adaptive_json),
    }))
}

fn simulate(cfg: &RunConfig) -> Result<Value> {
    let dgp = preset(cfg);
    let reps = cfg.reps.expect("defaulted");
    let s = run_replications(dgp, reps, cfg.method, &study_config(cfg), cfg.seed)?;
    if let Some(path) = &cfg.csv {
        write(path, &records_csv(&s)?)?;
    }
    if let Some(path) = &cfg.plot_data {
        let x = dgp.n as f64;
        let curves = [
            ("pi", &s.pi),
            ("order", &s.order),
            ("sigma_hat", &s.sigma_hat),
        ];
        let text = percentile_curves_csv(
            curves
                .iter()
                .filter_map(|(name, p)| p.as_ref().map(|p| (*name, x, p))),
        )?;
        write(path, &text)?;
    }
    Ok(serde_json::to_value(&s)?)
}

fn bootstrap(cfg: &RunConfig) -> Result<Value> {
    let (ds, family) = load(cfg)?;
    let (sel, _) = select(&ds, &family, cfg)?;
    let b = cfg.reps.expect("defaulted");
    let report = parametric_bootstrap(&ds, &family, &sel, b, &study_config(cfg), cfg.seed)?;
    Ok(json!({
        "selected": model_json(&ds, &sel),
        "bootstrap": serde_json::to_value(&report)?,
    }))
}

fn subsample(cfg: &RunConfig) -> Result<Value> {
    let (ds, family) = load(cfg)?;
    let reps = cfg.reps.expect("defaulted");
    let report = subsample_study(
        &ds,
        &family,
        cfg.method,
        &cfg.sizes,
        reps,
        &study_config(cfg),
        cfg.seed,
    )?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &cfg.plot_data {
        let text = percentile_curves_csv(
            report
                .curves
                .iter()
                .filter_map(|c| c.pi.as_ref().map(|p| ("pi", c.size as f64, p))),
        )?;
        write(path, &text)?;
    }
    Ok(serde_json::to_value(&report)?)
}

fn coverage(cfg: &RunConfig) -> Result<Value> {
    let report = coverage_study(
        preset(cfg),
        cfg.level.expect("defaulted"),
        cfg.reps.expect("defaulted"),
        &study_config(cfg),
        cfg.seed,
        cfg.oracle,
    )?;
    Ok(serde_json::to_value(&report)?)
}

fn risk(cfg: &RunConfig) -> Result<Value> {
    let report = risk_comparison(
        preset(cfg),
        cfg.reps.expect("defaulted"),
        &study_config(cfg),
        cfg.seed,
    )?;
    let mut v = serde_json::to_value(&report)?;
    v["adaptive_ratio"] = json!(report.adaptive_ratio());
    Ok(v)
}
