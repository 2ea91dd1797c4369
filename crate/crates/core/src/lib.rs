//! Model-selection diagnostics for linear regression.
//!
//! The crate fits least-squares models with a rank-revealing QR, builds
//! candidate families (nested polynomial orders, all subsets), selects by
//! AIC or BIC with an exact best-subset search, and computes the
//! parametricness index of the selected model together with the adaptive
//! AIC/BIC rule built on it.

pub mod criteria;
pub mod data;
pub mod error;
pub mod linalg;
pub mod model_space;
pub mod pi;
pub mod subset_search;

pub use criteria::{aic_score, bic_score, ic_value, Criterion, IcConfig, SigmaMode};
pub use data::{Dataset, DesignMatrix, Truth};
pub use error::{Error, Result};
pub use linalg::{least_squares_fit, oracle_residual_norm, tse, FitSummary};
pub use model_space::{
    build_family, build_polynomial_design, submodels_one_less, Family, FamilyConfig, FamilyKind,
    InterceptPolicy, ModelSpec,
};
pub use pi::{
    adaptive_select, classify, compute_pi, oracle_conditions, AdaptiveSelection, Classification,
    ConditionDiagnostics, PiReport,
};
pub use subset_search::{best_rss_per_size, select_best, BestSubsets, SelectionResult};
