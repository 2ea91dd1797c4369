//! Simulation studies around the parametricness index.
//!
//! Every study is a deterministic function of its configuration and base
//! seed: replication `r` draws from seed `base_seed + r`, replications run in
//! parallel and are aggregated in index order.

pub mod bootstrap;
pub mod coverage;
pub mod dgp;
pub mod error;
pub mod output;
pub mod replicate;
pub mod risk;
pub mod stats;
pub mod subsample;
pub mod trend;

pub use bootstrap::{parametric_bootstrap, BootstrapReport};
pub use coverage::{coverage_study, CoverageReport};
pub use dgp::{generate_dataset, Correlation, DesignSpec, Dgp, DgpKind, PolynomialMean};
pub use error::{Error, Result};
pub use replicate::{run_replications, SelectionMethod, SimSummary, StudyConfig};
pub use risk::{risk_comparison, RiskReport};
pub use stats::{MeanSe, Percentiles};
pub use subsample::{subsample_study, SubsampleReport};
pub use trend::{condition_trend, pi_trend};
