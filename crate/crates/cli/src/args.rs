//! Command-line surface and its validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use pindex_core::{FamilyKind, IcConfig, InterceptPolicy, SigmaMode};
use pindex_sim::dgp::DEFAULT_MAX_ORDER;
use pindex_sim::{DesignSpec, Dgp, DgpKind, SelectionMethod};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "pindex",
    version,
    about = "Parametricness index diagnostics for linear model selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a model by AIC, BIC or the adaptive rule and report the fit.
    Fit(Args),
    /// Select a model and report its parametricness index.
    Pi(Args),
    /// Replicate a preset process and summarize selections and indices.
    Simulate(Args),
    /// Parametric bootstrap from the selected model.
    Bootstrap(Args),
    /// Index percentiles on subsamples of several sizes.
    Subsample(Args),
    /// Coverage of naive post-selection confidence intervals.
    Coverage(Args),
    /// Risk of AIC, BIC and the adaptive rule on shared datasets.
    Risk(Args),
}

impl Command {
    pub fn parts(&self) -> (CommandKind, &Args) {
        match self {
            Command::Fit(a) => (CommandKind::Fit, a),
            Command::Pi(a) => (CommandKind::Pi, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Bootstrap(a) => (CommandKind::Bootstrap, a),
            Command::Subsample(a) => (CommandKind::Subsample, a),
            Command::Coverage(a) => (CommandKind::Coverage, a),
            Command::Risk(a) => (CommandKind::Risk, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Fit,
    Pi,
    Simulate,
    Bootstrap,
    Subsample,
    Coverage,
    Risk,
}

impl CommandKind {
    fn as_str(self) -> &'static str {
        match self {
            CommandKind::Fit => "fit",
            CommandKind::Pi => "pi",
            CommandKind::Simulate => "simulate",
            CommandKind::Bootstrap => "bootstrap",
            CommandKind::Subsample => "subsample",
            CommandKind::Coverage => "coverage",
            CommandKind::Risk => "risk",
        }
    }

    fn default_reps(self) -> Option<usize> {
        match self {
            CommandKind::Fit | CommandKind::Pi => None,
            CommandKind::Bootstrap => Some(200),
            CommandKind::Subsample => Some(100),
            CommandKind::Simulate | CommandKind::Coverage | CommandKind::Risk => Some(300),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Nested,
    Subset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterceptArg {
    Always,
    Selectable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Aic,
    Bic,
    Adaptive,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Args {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column of the CSV file.
    #[arg(long)]
    pub response: Option<String>,
    /// Simulation preset (example1_case1 … example7).
    #[arg(long)]
    pub preset: Option<String>,
    /// Candidate family for CSV data.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Largest polynomial order for nested families.
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Whether subsets may drop the intercept (CSV data only).
    #[arg(long, value_enum)]
    pub intercept: Option<InterceptArg>,
    /// Penalty multiplier λ_n of the index criterion.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Extra penalty d of the index criterion.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub d: f64,
    /// Known noise standard deviation; the index uses the estimate when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Classification cutoff (default 1.6 nested, 1.2 subsets).
    #[arg(long, allow_negative_numbers = true)]
    pub cutoff: Option<f64>,
    /// Selection rule (default bic).
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Replications, resamples or subsamples per size.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Base seed of every random draw.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sample size of a preset.
    #[arg(long)]
    pub n: Option<usize>,
    /// Noise standard deviation of a preset.
    #[arg(long, allow_negative_numbers = true)]
    pub noise: Option<f64>,
    /// Comma-separated subsample sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Nominal confidence level.
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<f64>,
    /// Build intervals from the true model instead of the BIC choice.
    #[arg(long)]
    pub oracle: bool,
    /// JSON report path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-replication CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Percentile-curve CSV path.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Write the generated preset dataset as CSV.
    #[arg(long)]
    pub save_data: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "PINDEX_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Csv { path: PathBuf, response: String },
    Preset(Dgp),
}

/// A validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Source,
    pub family: FamilyKind,
    pub max_order: usize,
    pub intercept: InterceptPolicy,
    pub ic: IcConfig,
    pub cutoff: Option<f64>,
    pub method: SelectionMethod,
    pub reps: Option<usize>,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub level: Option<f64>,
    pub oracle: bool,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot_data: Option<PathBuf>,
    pub save_data: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn cutoff_used(&self) -> f64 {
        self.cutoff
            .unwrap_or_else(|| pindex_core::pi::default_cutoff(self.family))
    }
}

/// Checks every option and reports all problems together.
pub fn validate(command: CommandKind, a: &Args) -> Result<RunConfig> {
    let mut problems: Vec<String> = Vec::new();
    let cmd = command.as_str();
    let sim_only = matches!(
        command,
        CommandKind::Simulate | CommandKind::Coverage | CommandKind::Risk
    );

    let mut source = None;
    match (&a.data, &a.preset) {
        (Some(_), Some(_)) => problems.push("--data and --preset are mutually exclusive".into()),
        (None, None) => problems.push("a data source is required: --data or --preset".into()),
        (Some(path), None) => {
            if sim_only {
                problems.push(format!("{cmd} needs a --preset, not --data"));
            }
            match &a.response {
                Some(r) => {
                    source = Some(Source::Csv {
                        path: path.clone(),
                        response: r.clone(),
                    })
                }
                None => problems.push("--data needs --response".into()),
            }
        }
        (None, Some(name)) => match name.parse::<DgpKind>() {
            Ok(kind) => {
                let mut dgp = Dgp::preset(kind).expect("named presets build");
                if let Some(n) = a.n {
                    dgp = dgp.with_n(n);
                }
                if let Some(s) = a.noise {
                    dgp = dgp.with_sigma(s);
                }
                if let Some(m) = a.max_order {
                    match &mut dgp.design {
                        DesignSpec::Polynomial { max_order, .. } => *max_order = m,
                        DesignSpec::Linear { .. } => {
                            problems.push(format!("--max-order does not apply to {name}"))
                        }
                    }
                }
                if let Err(e) = dgp.validate() {
                    problems.push(e.message().to_string());
                }
                source = Some(Source::Preset(dgp));
            }
            Err(e) => problems.push(e.message().to_string()),
        },
    }
    if a.data.is_none() {
        if a.response.is_some() {
            problems.push("--response applies only to --data".into());
        }
        if a.intercept == Some(InterceptArg::Selectable) {
            problems.push("--intercept selectable applies only to --data".into());
        }
    } else {
        for (set, flag) in [(a.n.is_some(), "--n"), (a.noise.is_some(), "--noise")] {
            if set {
                problems.push(format!("{flag} applies only to --preset"));
            }
        }
        if a.save_data.is_some() {
            problems.push("--save-data applies only to --preset".into());
        }
    }

    let preset_family = match &source {
        Some(Source::Preset(d)) => Some(d.family_config().kind),
        _ => None,
    };
    let family = match (a.family, preset_family) {
        (Some(f), Some(p)) => {
            let f = to_kind(f);
            if f != p {
                problems.push(format!(
                    "--family {} conflicts with the preset's {} family",
                    f.as_str(),
                    p.as_str()
                ));
            }
            p
        }
        (Some(f), None) => to_kind(f),
        (None, Some(p)) => p,
        (None, None) => FamilyKind::AllSubset,
    };
    let intercept = match a.intercept {
        Some(InterceptArg::Selectable) => {
            if family == FamilyKind::Nested {
                problems.push("--intercept selectable needs the subset family".into());
            }
            InterceptPolicy::Selectable
        }
        _ => InterceptPolicy::Always,
    };
    let max_order = match &source {
        Some(Source::Preset(Dgp {
            design: DesignSpec::Polynomial { max_order, .. },
            ..
        })) => *max_order,
        _ => a.max_order.unwrap_or(DEFAULT_MAX_ORDER),
    };
    if a.max_order.is_some() && family == FamilyKind::AllSubset && a.data.is_some() {
        problems.push("--max-order applies only to the nested family".into());
    }
    if max_order == 0 {
        problems.push("--max-order must be at least 1".into());
    }

    if !(a.lambda.is_finite() && a.lambda > 0.0) {
        problems.push(format!("--lambda must be positive, got {}", a.lambda));
    }
    if !(a.d.is_finite() && a.d >= 0.0) {
        problems.push(format!("--d must be non-negative, got {}", a.d));
    }
    let sigma_mode = match a.sigma {
        Some(s) if s.is_finite() && s > 0.0 => SigmaMode::Known { sigma2: s * s },
        Some(s) => {
            problems.push(format!("--sigma must be positive, got {s}"));
            SigmaMode::Estimated
        }
        None => SigmaMode::Estimated,
    };
    let ic = IcConfig {
        lambda_n: a.lambda,
        d: a.d,
        sigma_mode,
    };
    if let Some(Source::Preset(d)) = &source {
        if let Err(e) = ic.validate(d.n) {
            if a.lambda.is_finite() && a.lambda > 0.0 && a.d >= 0.0 {
                problems.push(e.message().to_string());
            }
        }
    }
    if let Some(c) = a.cutoff {
        if !(c.is_finite() && c > 0.0) {
            problems.push(format!("--cutoff must be positive, got {c}"));
        }
    }

    let method = match (command, a.method) {
        (CommandKind::Coverage, Some(m)) if m != MethodArg::Bic => {
            problems.push("coverage always selects by BIC".into());
            SelectionMethod::Bic
        }
        (CommandKind::Risk, Some(_)) => {
            problems.push("risk compares all three rules; --method does not apply".into());
            SelectionMethod::Adaptive
        }
        (CommandKind::Bootstrap, Some(MethodArg::Adaptive)) => {
            problems.push("bootstrap reselects by aic or bic".into());
            SelectionMethod::Bic
        }
        (_, m) => match m.unwrap_or(MethodArg::Bic) {
            MethodArg::Aic => SelectionMethod::Aic,
            MethodArg::Bic => SelectionMethod::Bic,
            MethodArg::Adaptive => SelectionMethod::Adaptive,
        },
    };

    let reps = match (command.default_reps(), a.reps) {
        (None, Some(_)) => {
            problems.push(format!("--reps does not apply to {cmd}"));
            None
        }
        (Some(_), Some(0)) => {
            problems.push("--reps must be at least 1".into());
            None
        }
        (Some(d), r) => Some(r.unwrap_or(d)),
        (None, None) => None,
    };

    if command == CommandKind::Subsample {
        if a.sizes.is_empty() {
            problems.push("subsample needs --sizes".into());
        }
        if a.sizes.contains(&0) {
            problems.push("--sizes must be positive".into());
        }
    } else if !a.sizes.is_empty() {
        problems.push(format!("--sizes does not apply to {cmd}"));
    }
    let level = if command == CommandKind::Coverage {
        let l = a.level.unwrap_or(0.95);
        if !(l > 0.0 && l < 1.0) {
            problems.push(format!("--level must lie in (0, 1), got {l}"));
        }
        Some(l)
    } else {
        if a.level.is_some() {
            problems.push(format!("--level does not apply to {cmd}"));
        }
        None
    };
    if a.oracle && command != CommandKind::Coverage {
        problems.push(format!("--oracle does not apply to {cmd}"));
    }
    if a.csv.is_some() && command != CommandKind::Simulate {
        problems.push(format!("--csv does not apply to {cmd}"));
    }
    if a.plot_data.is_some() && !matches!(command, CommandKind::Simulate | CommandKind::Subsample) {
        problems.push(format!("--plot-data does not apply to {cmd}"));
    }
    if a.threads == Some(0) {
        problems.push("--threads must be at least 1".into());
    }

    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    Ok(RunConfig {
        command,
        source: source.expect("validated source"),
        family,
        max_order,
        intercept,
        ic,
        cutoff: a.cutoff,
        method,
        reps,
        seed: a.seed,
        sizes: a.sizes.clone(),
        level,
        oracle: a.oracle,
        out: a.out.clone(),
        csv: a.csv.clone(),
        plot_data: a.plot_data.clone(),
        save_data: a.save_data.clone(),
        threads: a.threads,
    })
}

fn to_kind(f: FamilyArg) -> FamilyKind {
    match f {
        FamilyArg::Nested => FamilyKind::Nested,
        FamilyArg::Subset => FamilyKind::AllSubset,
    }
}
