use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{fit_loglog_slope, mean_ci95, mise, rmise};
use super::setup::{gen_experiment, ExperimentSpec, ExperimentValue, GeneratedExperiment};
use crate::coalition::Partition;
use crate::error::{Error, Result};
use crate::game::ExactOptions;
use crate::mc::{McOptions, SamplerMode};
use crate::par::map_indices;

/// Error of one Monte Carlo run at one iteration count, over all observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub experiment: String,
    pub target: String,
    #[serde(rename = "K")]
    pub k: u64,
    pub run: usize,
    pub mise: f64,
    pub rmise: f64,
    pub seconds: f64,
    /// Mean over observations of the squared standard error.
    #[serde(skip_serializing, default)]
    pub variance: f64,
}

/// Aggregates over runs at one iteration count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSummary {
    #[serde(rename = "K")]
    pub k: u64,
    pub mise_mean: f64,
    pub mise_ci95: [f64; 2],
    pub rmise_mean: f64,
    pub rmise_ci95: [f64; 2],
    /// Mean over runs and observations of the squared standard error.
    pub variance_mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceSummary {
    pub experiment: String,
    pub value: ExperimentValue,
    pub target: String,
    pub p: usize,
    pub size: usize,
    pub runs: usize,
    pub seed: u64,
    pub k_grid: Vec<u64>,
    pub model: String,
    pub partition: Partition,
    pub gamma_parameterization: &'static str,
    pub normal_parameterization: &'static str,
    pub ci_method: &'static str,
    pub per_k: Vec<KSummary>,
    /// Slope of `log2(mean MISE)` on `log2 K`; absent for a single iteration count.
    pub mise_slope: Option<f64>,
    pub rmise_slope: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub summary: ConvergenceSummary,
    pub rows: Vec<ConvergenceRow>,
    /// Exact target value at every background row.
    pub exact: Vec<f64>,
}

#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(target_arch = "wasm32")]
fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    (f(), 0.0)
}

/// Exact target values at every background row.
pub fn exact_targets(gen: &GeneratedExperiment, opts: &ExactOptions) -> Result<Vec<f64>> {
    (0..gen.data.len())
        .map(|obs| gen.exact_target(obs, opts))
        .collect()
}

/// Replicate id of observation `obs` in run `run` at grid position `k_idx`.
pub fn replicate_id(k_idx: usize, run: usize, runs: usize, obs: usize, n_obs: usize) -> u64 {
    ((k_idx * runs + run) * n_obs + obs) as u64
}

/// One run at one iteration count: estimates at every observation.
fn run_cell(
    gen: &GeneratedExperiment,
    exact: &[f64],
    k_idx: usize,
    run: usize,
) -> Result<ConvergenceRow> {
    let spec = &gen.spec;
    let k = spec.k_grid[k_idx];
    let n_obs = gen.data.len();
    let mut estimates = Vec::with_capacity(n_obs);
    let mut variance = 0.0;
    for obs in 0..n_obs {
        let opts = McOptions::new(SamplerMode::empirical(k)?, spec.seed)
            .with_replicate(replicate_id(k_idx, run, spec.runs, obs, n_obs));
        let est = gen.estimate_target(obs, &opts)?;
        estimates.push(est.mean());
        variance += est.stderr().powi(2);
    }
    Ok(ConvergenceRow {
        experiment: spec.id.to_string(),
        target: gen.target.to_string(),
        k,
        run,
        mise: mise(exact, &estimates)?,
        rmise: rmise(exact, &estimates)?,
        seconds: 0.0,
        variance: variance / n_obs as f64,
    })
}

/// Runs the full study: the oracle once per observation, then `runs` Monte Carlo
/// replicates at every grid point. `on_row` sees each grid point's rows as soon
/// as they are complete.
pub fn run_convergence_with<F>(spec: &ExperimentSpec, mut on_row: F) -> Result<ConvergenceReport>
where
    F: FnMut(&ConvergenceRow),
{
    let gen = gen_experiment(spec)?;
    let opts = ExactOptions {
        limit: spec.p.max(crate::game::DEFAULT_EXACT_LIMIT),
    };
    let exact = exact_targets(&gen, &opts)?;
    if exact.iter().all(|&v| v == 0.0) {
        return Err(Error::data("exact target is zero at every observation"));
    }

    let mut rows = Vec::with_capacity(spec.k_grid.len() * spec.runs);
    let mut per_k = Vec::with_capacity(spec.k_grid.len());
    for k_idx in 0..spec.k_grid.len() {
        let cell_rows = map_indices(spec.runs, 0, |_, run| {
            let (row, seconds) = timed(|| run_cell(&gen, &exact, k_idx, run));
            row.map(|r| ConvergenceRow { seconds, ..r })
        })?;
        for row in &cell_rows {
            on_row(row);
        }
        per_k.push(summarize_k(spec.k_grid[k_idx], &cell_rows));
        rows.extend(cell_rows);
    }

    let slope = |f: fn(&KSummary) -> f64| -> Result<Option<f64>> {
        if per_k.len() < 2 {
            return Ok(None);
        }
        let points: Vec<(f64, f64)> = per_k.iter().map(|s| (s.k as f64, f(s))).collect();
        fit_loglog_slope(&points).map(Some)
    };
    let summary = ConvergenceSummary {
        experiment: spec.id.to_string(),
        value: gen.value,
        target: gen.target.to_string(),
        p: spec.p,
        size: spec.size,
        runs: spec.runs,
        seed: spec.seed,
        k_grid: spec.k_grid.clone(),
        model: gen.model.describe(),
        partition: gen.partition.clone(),
        gamma_parameterization: "shape-scale",
        normal_parameterization: "mean-variance",
        ci_method: "mean +/- 1.96 * sd / sqrt(runs)",
        mise_slope: slope(|s| s.mise_mean)?,
        rmise_slope: slope(|s| s.rmise_mean)?,
        per_k,
    };
    Ok(ConvergenceReport {
        summary,
        rows,
        exact,
    })
}

pub fn run_convergence(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    run_convergence_with(spec, |_| {})
}

fn summarize_k(k: u64, rows: &[ConvergenceRow]) -> KSummary {
    let mises: Vec<f64> = rows.iter().map(|r| r.mise).collect();
    let rmises: Vec<f64> = rows.iter().map(|r| r.rmise).collect();
    let (mise_mean, (mlo, mhi)) = mean_ci95(&mises);
    let (rmise_mean, (rlo, rhi)) = mean_ci95(&rmises);
    KSummary {
        k,
        mise_mean,
        mise_ci95: [mlo, mhi],
        rmise_mean,
        rmise_ci95: [rlo, rhi],
        variance_mean: rows.iter().map(|r| r.variance).sum::<f64>() / rows.len() as f64,
    }
}

/// Writes the run table as CSV with columns `experiment,target,K,run,mise,rmise,seconds`.
pub fn write_rows_csv<W: Write>(rows: &[ConvergenceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json<W: Write>(summary: &ConvergenceSummary, mut writer: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, summary)?;
    writeln!(writer)?;
    Ok(())
}

/// Writes `convergence.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_outputs(report: &ConvergenceReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rows_csv(
        &report.rows,
        std::fs::File::create(dir.join("convergence.csv"))?,
    )?;
    write_summary_json(
        &report.summary,
        std::fs::File::create(dir.join("summary.json"))?,
    )
}
