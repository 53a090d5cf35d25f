//! Synthetic convergence studies: data generators, error metrics and the run protocol.

mod convergence;
mod distributions;
mod metrics;
mod setup;

pub use convergence::{
    exact_targets, replicate_id, run_convergence, run_convergence_with, write_outputs,
    write_rows_csv, write_summary_json, ConvergenceReport, ConvergenceRow, ConvergenceSummary,
    KSummary,
};
pub use distributions::{sample_distribution, standard_normal, Distribution, MultivariateNormal};
pub use metrics::{fit_loglog_slope, fit_slope, mean_ci95, mise, rmise};
pub use setup::{
    gen_experiment, ExperimentId, ExperimentSpec, ExperimentValue, GeneratedExperiment, Target,
};
