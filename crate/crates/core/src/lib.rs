//! Exact and Monte Carlo estimation of marginal game values for model explanations.
//!
//! The crate covers linear game values (Shapley, Banzhaf, custom weight
//! tables), quotient game values over a partition of the features,
//! coalitional values (Owen, Banzhaf-Owen) and two-step Shapley. Every value
//! has a brute-force oracle in [`game`] and a sampling estimator in [`mc`];
//! [`experiments`] holds the synthetic convergence studies.

pub mod coalition;
pub mod dataset;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod game;
pub mod mc;
pub mod model;
mod par;
pub mod weights;

pub use coalition::{Coalition, Partition, MAX_PLAYERS};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use estimate::Estimate;
pub use game::{AttributionVector, ExactOptions, ExplainContext, Mode, ValueKind};
pub use mc::{McOptions, McResult, SamplerMode};
pub use model::{ModelConfig, ModelSpec};
pub use weights::{CoalitionalWeightScheme, ExplicitTable, WeightScheme};
