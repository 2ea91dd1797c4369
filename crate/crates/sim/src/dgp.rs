//! Data-generating processes for the simulation studies.
//!
//! Single-predictor processes draw `x ~ N(0, 1)` and fit nested polynomial
//! orders. Multi-predictor processes draw correlated standard normal
//! predictors (optionally with a uniform `u` entering through a smooth
//! nonlinear term) and fit all subsets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use pindex_core::model_space::{polynomial_dataset, MAX_SUBSET_PREDICTORS};
use pindex_core::{Dataset, FamilyConfig, ModelSpec, Truth};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use pindex_core::{Error, Result};

fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Number of powers of `u` offered as candidates when the nonlinear term is on.
pub const U_POWERS: usize = 8;
/// Largest polynomial order offered by the single-predictor presets.
pub const DEFAULT_MAX_ORDER: usize = 30;
pub const DEFAULT_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DgpKind {
    Example1Case1,
    Example1Case2,
    Example2Case1,
    Example2Case2,
    Example3,
    Example4,
    Example5,
    Example6,
    Example7,
    Custom,
}

impl DgpKind {
    pub const PRESETS: [DgpKind; 9] = [
        DgpKind::Example1Case1,
        DgpKind::Example1Case2,
        DgpKind::Example2Case1,
        DgpKind::Example2Case2,
        DgpKind::Example3,
        DgpKind::Example4,
        DgpKind::Example5,
        DgpKind::Example6,
        DgpKind::Example7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DgpKind::Example1Case1 => "example1_case1",
            DgpKind::Example1Case2 => "example1_case2",
            DgpKind::Example2Case1 => "example2_case1",
            DgpKind::Example2Case2 => "example2_case2",
            DgpKind::Example3 => "example3",
            DgpKind::Example4 => "example4",
            DgpKind::Example5 => "example5",
            DgpKind::Example6 => "example6",
            DgpKind::Example7 => "example7",
            DgpKind::Custom => "custom",
        }
    }

    pub fn preset_names() -> Vec<&'static str> {
        Self::PRESETS.iter().map(|k| k.as_str()).collect()
    }
}

impl fmt::Display for DgpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DgpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::PRESETS
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                parameter(format!(
                    "unknown preset '{s}'; valid presets: {}",
                    Self::preset_names().join(", ")
                ))
            })
    }
}

/// Correlation structure of the Gaussian predictors (unit variances).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Correlation {
    Identity,
    /// `corr(x_i, x_j) = ρ^|i−j|`.
    Autoregressive {
        rho: f64,
    },
    /// `corr(x_i, x_j) = ρ` for `i ≠ j`.
    Exchangeable {
        rho: f64,
    },
}

impl Correlation {
    pub fn matrix(&self, p: usize) -> DMatrix<f64> {
        DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                return 1.0;
            }
            match *self {
                Correlation::Identity => 0.0,
                Correlation::Autoregressive { rho } => rho.powi(i.abs_diff(j) as i32),
                Correlation::Exchangeable { rho } => rho,
            }
        })
    }

    /// Symmetric square root `V diag(√λ) Vᵀ`; fails unless positive definite.
    pub fn sqrt(&self, p: usize) -> Result<DMatrix<f64>> {
        let eig = SymmetricEigen::new(self.matrix(p));
        let min = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min.is_nan() || min <= 1e-10 {
            return Err(parameter(format!(
                "correlation {self:?} is not positive definite for {p} predictors (smallest eigenvalue {min:.3e})"
            )));
        }
        let root = eig.eigenvalues.map(f64::sqrt);
        Ok(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
    }
}

/// `Σ_j c_j x^j + a sin(2πx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMean {
    /// Coefficients of `1, x, x², …`.
    pub coefficients: Vec<f64>,
    pub sine_amplitude: f64,
}

impl PolynomialMean {
    pub fn eval(&self, x: f64) -> f64 {
        let poly = self
            .coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c);
        poly + self.sine_amplitude * (2.0 * PI * x).sin()
    }

    /// Highest order with a nonzero coefficient.
    fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }
}

/// Smooth nonlinear component `3(1 − 0.5u + 2u²) exp(−u²/4)`.
pub fn nonlinear_component(u: f64) -> f64 {
    3.0 * (1.0 - 0.5 * u + 2.0 * u * u) * (-u * u / 4.0).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DesignSpec {
    /// One standard normal predictor; nested polynomial orders `1..=max_order`.
    Polynomial {
        mean: PolynomialMean,
        max_order: usize,
    },
    /// Correlated standard normal predictors with `Y = βᵀx [+ φ(u)] + σε`;
    /// all-subset family over `x_1..x_p` and, with the nonlinear term,
    /// `u, u², …, u⁸` with `u ~ uniform(−4, 4)`.
    Linear {
        beta: Vec<f64>,
        correlation: Correlation,
        nonlinear: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dgp {
    pub kind: DgpKind,
    pub n: usize,
    pub sigma: f64,
    pub design: DesignSpec,
}

impl Dgp {
    /// A preset at its default sample size and noise level.
    pub fn preset(kind: DgpKind) -> Result<Self> {
        let poly = |coefficients: Vec<f64>, sine: f64, sigma: f64| Dgp {
            kind,
            n: DEFAULT_N,
            sigma,
            design: DesignSpec::Polynomial {
                mean: PolynomialMean {
                    coefficients,
                    sine_amplitude: sine,
                },
                max_order: DEFAULT_MAX_ORDER,
            },
        };
        let linear = |beta: Vec<f64>, correlation: Correlation, nonlinear: bool, sigma: f64| Dgp {
            kind,
            n: DEFAULT_N,
            sigma,
            design: DesignSpec::Linear {
                beta,
                correlation,
                nonlinear,
            },
        };
        let ex3_beta = vec![3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];
        let ar5 = Correlation::Autoregressive { rho: 0.5 };
        let ex2_poly = vec![1.0, -2.0, 1.6, 0.5];
        Ok(match kind {
            DgpKind::Example1Case1 => poly(vec![], 3.0, 3.0),
            DgpKind::Example1Case2 => poly(vec![3.0, -5.0, 2.0, 1.5, 0.8], 0.0, 7.0),
            DgpKind::Example2Case1 => poly(ex2_poly, 3.0, 2.0),
            DgpKind::Example2Case2 => poly(ex2_poly, 1.0, 2.0),
            DgpKind::Example3 => linear(ex3_beta, ar5, false, 5.0),
            DgpKind::Example4 => linear(vec![0.85; 8], ar5, false, 3.0),
            DgpKind::Example5 => linear(
                vec![
                    0.9, 0.9, 0.0, 0.0, 2.0, 0.0, 0.0, 1.6, 2.2, 0.0, 0.0, 0.0, 0.0,
                ],
                Correlation::Exchangeable { rho: 0.6 },
                false,
                3.0,
            ),
            DgpKind::Example6 => {
                let mut beta = vec![0.0; 13];
                beta[0] = 0.85;
                beta[1] = 0.85;
                beta[4] = 2.0;
                linear(beta, Correlation::Exchangeable { rho: 0.5 }, false, 3.0)
            }
            DgpKind::Example7 => linear(ex3_beta, ar5, true, 3.0),
            DgpKind::Custom => {
                return Err(parameter("custom processes are built from a DesignSpec"))
            }
        })
    }

    pub fn custom(n: usize, sigma: f64, design: DesignSpec) -> Result<Self> {
        let dgp = Dgp {
            kind: DgpKind::Custom,
            n,
            sigma,
            design,
        };
        dgp.validate()?;
        Ok(dgp)
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n < 10 {
            problems.push(format!("n must be at least 10, got {}", self.n));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            problems.push(format!("sigma must be non-negative, got {}", self.sigma));
        } else if self.sigma == 0.0 && self.kind != DgpKind::Custom {
            problems.push("preset processes need sigma > 0".to_string());
        }
        match &self.design {
            DesignSpec::Polynomial { mean, max_order } => {
                if *max_order == 0 {
                    problems.push("max_order must be at least 1".into());
                }
                if mean
                    .coefficients
                    .iter()
                    .chain([&mean.sine_amplitude])
                    .any(|c| !c.is_finite())
                {
                    problems.push("mean coefficients must be finite".into());
                }
            }
            DesignSpec::Linear {
                beta,
                correlation,
                nonlinear,
            } => {
                let p = beta.len() + if *nonlinear { U_POWERS } else { 0 };
                if beta.is_empty() {
                    problems.push("beta must have at least one entry".into());
                }
                if p > MAX_SUBSET_PREDICTORS {
                    problems.push(format!(
                        "{p} candidate terms exceed the limit of {MAX_SUBSET_PREDICTORS}"
                    ));
                }
                if beta.iter().any(|b| !b.is_finite()) {
                    problems.push("beta must be finite".into());
                }
                match *correlation {
                    Correlation::Identity => {}
                    Correlation::Autoregressive { rho } | Correlation::Exchangeable { rho } => {
                        if !(rho.is_finite() && rho.abs() < 1.0) {
                            problems.push(format!("rho must lie in (-1, 1), got {rho}"));
                        }
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(parameter(problems.join("; ")))
        }
    }

    /// Candidate family the process is studied with.
    pub fn family_config(&self) -> FamilyConfig {
        match &self.design {
            DesignSpec::Polynomial { max_order, .. } => FamilyConfig::nested(*max_order),
            DesignSpec::Linear {
                beta, nonlinear, ..
            } => FamilyConfig::all_subset(beta.len() + if *nonlinear { U_POWERS } else { 0 }),
        }
    }

    /// Labels of the candidate predictors, in term order.
    pub fn predictor_labels(&self) -> Vec<String> {
        match &self.design {
            DesignSpec::Polynomial { max_order, .. } => {
                (1..=*max_order).map(|j| format!("x^{j}")).collect()
            }
            DesignSpec::Linear {
                beta, nonlinear, ..
            } => {
                let mut labels: Vec<String> = (1..=beta.len()).map(|j| format!("x{j}")).collect();
                if *nonlinear {
                    labels.push("u".into());
                    labels.extend((2..=U_POWERS).map(|k| format!("u^{k}")));
                }
                labels
            }
        }
    }

    /// The true model when it is a member of the candidate family.
    pub fn true_model(&self) -> Option<ModelSpec> {
        match &self.design {
            DesignSpec::Polynomial { mean, max_order } => {
                let deg = mean.degree();
                (mean.sine_amplitude == 0.0 && deg >= 1 && deg <= *max_order)
                    .then(|| ModelSpec::nested(deg))
            }
            DesignSpec::Linear {
                beta, nonlinear, ..
            } => (!nonlinear).then(|| {
                let terms = beta
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| **b != 0.0)
                    .map(|(j, _)| j + 1)
                    .collect();
                ModelSpec::subset(terms, true)
            }),
        }
    }

    /// True coefficient of every candidate predictor, when the mean is a
    /// finite combination of them.
    pub fn true_coefficients(&self) -> Option<Vec<f64>> {
        match &self.design {
            DesignSpec::Polynomial { mean, max_order } => {
                if mean.sine_amplitude != 0.0 || mean.degree() > *max_order {
                    return None;
                }
                let mut c = vec![0.0; *max_order];
                for (j, v) in mean.coefficients.iter().enumerate().skip(1) {
                    c[j - 1] = *v;
                }
                Some(c)
            }
            DesignSpec::Linear {
                beta, nonlinear, ..
            } => (!nonlinear).then(|| beta.clone()),
        }
    }
}

/// One dataset from the process; a deterministic function of `(dgp, seed)`.
///
/// Rows are generated in order; each row draws its predictors, then `u`
/// (if any), then the noise.
pub fn generate_dataset(dgp: &Dgp, seed: u64) -> Result<Dataset> {
    dgp.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dgp.n;
    let truth = |mean: Vec<f64>| Truth {
        mean,
        sigma: dgp.sigma,
        model: dgp.true_model(),
        coefficients: dgp.true_coefficients(),
    };
    match &dgp.design {
        DesignSpec::Polynomial { mean, max_order } => {
            let mut x = Vec::with_capacity(n);
            let mut f = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for _ in 0..n {
                let xi: f64 = rng.sample(StandardNormal);
                let e: f64 = rng.sample(StandardNormal);
                let fi = mean.eval(xi);
                x.push(xi);
                f.push(fi);
                y.push(fi + dgp.sigma * e);
            }
            polynomial_dataset(&x, y, *max_order)?.with_truth(truth(f))
        }
        DesignSpec::Linear {
            beta,
            correlation,
            nonlinear,
        } => {
            let p = beta.len();
            let root = correlation.sqrt(p)?;
            let q = p + if *nonlinear { U_POWERS } else { 0 };
            let mut cols = vec![Vec::with_capacity(n); q];
            let mut f = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            let mut z = vec![0.0; p];
            for _ in 0..n {
                for zj in z.iter_mut() {
                    *zj = rng.sample(StandardNormal);
                }
                let mut fi = 0.0;
                for j in 0..p {
                    let xj: f64 = (0..p).map(|k| root[(j, k)] * z[k]).sum();
                    fi += beta[j] * xj;
                    cols[j].push(xj);
                }
                if *nonlinear {
                    let u: f64 = rng.random_range(-4.0..4.0);
                    fi += nonlinear_component(u);
                    let mut pow = 1.0;
                    for col in cols.iter_mut().skip(p) {
                        pow *= u;
                        col.push(pow);
                    }
                }
                let e: f64 = rng.sample(StandardNormal);
                f.push(fi);
                y.push(fi + dgp.sigma * e);
            }
            Dataset::from_predictors(y, cols, dgp.predictor_labels())?.with_truth(truth(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_custom_returns_the_mean() {
        let dgp = Dgp::custom(
            25,
            0.0,
            DesignSpec::Linear {
                beta: vec![1.0, -2.0],
                correlation: Correlation::Identity,
                nonlinear: false,
            },
        )
        .unwrap();
        let ds = generate_dataset(&dgp, 3).unwrap();
        assert_eq!(ds.y(), ds.truth().unwrap().mean.as_slice());
    }

    #[test]
    fn same_seed_same_data() {
        for kind in DgpKind::PRESETS {
            let dgp = Dgp::preset(kind).unwrap().with_n(30);
            let a = generate_dataset(&dgp, 17).unwrap();
            let b = generate_dataset(&dgp, 17).unwrap();
            assert_eq!(a, b);
            let c = generate_dataset(&dgp, 18).unwrap();
            assert_ne!(a.y(), c.y());
        }
    }

    #[test]
    fn ar_correlation_at_lag_two() {
        let dgp = Dgp::preset(DgpKind::Example3).unwrap().with_n(10_000);
        let ds = generate_dataset(&dgp, 1).unwrap();
        let (a, b) = (ds.design().column(1), ds.design().column(3));
        let n = a.len() as f64;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
        let (ma, mb) = (mean(a), mean(b));
        let cov: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / n;
        let sd = |v: &[f64], m: f64| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
        let r = cov / (sd(a, ma) * sd(b, mb));
        assert!((r - 0.25).abs() < 0.03, "corr(x1, x3) = {r}");
    }

    #[test]
    fn square_root_reproduces_the_matrix() {
        let c = Correlation::Exchangeable { rho: 0.6 };
        let r = c.sqrt(13).unwrap();
        let back = &r * &r;
        let m = c.matrix(13);
        for i in 0..13 {
            for j in 0..13 {
                assert_relative_eq!(back[(i, j)], m[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_correlation_is_rejected() {
        let c = Correlation::Exchangeable { rho: -0.5 };
        assert!(c.sqrt(4).is_err());
    }

    #[test]
    fn presets_carry_their_true_models() {
        let label = |k| Dgp::preset(k).unwrap().true_model().map(|m| m.label());
        assert_eq!(label(DgpKind::Example3).as_deref(), Some("125"));
        assert_eq!(label(DgpKind::Example4).as_deref(), Some("12345678"));
        assert_eq!(label(DgpKind::Example5).as_deref(), Some("12589"));
        assert_eq!(label(DgpKind::Example6).as_deref(), Some("125"));
        assert_eq!(label(DgpKind::Example1Case2).as_deref(), Some("order 4"));
        assert_eq!(label(DgpKind::Example7), None);
        assert_eq!(label(DgpKind::Example1Case1), None);
    }

    #[test]
    fn example7_has_sixteen_terms() {
        let dgp = Dgp::preset(DgpKind::Example7).unwrap().with_n(20);
        let ds = generate_dataset(&dgp, 0).unwrap();
        assert_eq!(ds.predictor_count(), 16);
        let u = ds.design().column(9);
        let u3 = ds.design().column(11);
        for (a, b) in u.iter().zip(u3) {
            assert!((-4.0..4.0).contains(a));
            assert_relative_eq!(a.powi(3), *b, max_relative = 1e-14);
        }
    }

    #[test]
    fn unknown_preset_lists_the_valid_ones() {
        let err = "example9".parse::<DgpKind>().unwrap_err().to_string();
        assert!(err.contains("example3") && err.contains("example1_case2"));
    }
}
