//! Monte Carlo estimators of game values.
//!
//! Each estimator averages a marginal contribution over `K` joint draws of a
//! coalition and a background row. Every feature (or group) gets its own
//! random stream, so estimates are reproducible per feature and do not
//! depend on the number of worker threads.

mod rng;
mod sampler;
mod variance;

pub use rng::{stream_rng, StreamId, StreamKind};
pub use sampler::{
    bernoulli_subset, fisher_yates_predecessors, permutation_predecessors,
    sample_coalition_bernoulli, sample_coalition_permutation, sample_coalition_table,
    CoalitionSampler, TableSampler,
};
pub use variance::{variance_bound_check, VarianceBound, VARIANCE_BOUND_LIMIT};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coalition::Partition;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::game::{AttributionVector, ExplainContext, Mode, ValueKind};
use crate::par::map_indices;
use crate::weights::{CoalitionalWeightScheme, WeightScheme};

/// Where the background row of each draw comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SamplerMode {
    /// One pass over the background data in order: `K = |D|`.
    TrueMarginal,
    /// `iterations` rows drawn uniformly with replacement.
    EmpiricalMarginal { iterations: u64 },
    /// A fixed row sequence (0-based indices). Consumes no randomness for rows.
    Scripted { rows: Vec<usize> },
}

impl SamplerMode {
    pub fn empirical(iterations: u64) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::contract("iteration count must be at least 1"));
        }
        Ok(SamplerMode::EmpiricalMarginal { iterations })
    }

    /// Number of draws against a dataset of `rows` rows.
    pub fn draws(&self, rows: usize) -> u64 {
        match self {
            SamplerMode::TrueMarginal => rows as u64,
            SamplerMode::EmpiricalMarginal { iterations } => *iterations,
            SamplerMode::Scripted { rows } => rows.len() as u64,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            SamplerMode::TrueMarginal | SamplerMode::Scripted { .. } => Mode::TrueMarginal,
            SamplerMode::EmpiricalMarginal { .. } => Mode::EmpiricalMarginal,
        }
    }

    fn validate(&self, rows: usize) -> Result<()> {
        match self {
            SamplerMode::TrueMarginal => Ok(()),
            SamplerMode::EmpiricalMarginal { iterations } => {
                if *iterations == 0 {
                    Err(Error::contract("iteration count must be at least 1"))
                } else {
                    Ok(())
                }
            }
            SamplerMode::Scripted { rows: script } => {
                if script.is_empty() {
                    return Err(Error::contract("row script is empty"));
                }
                match script.iter().find(|&&r| r >= rows) {
                    Some(r) => Err(Error::contract(format!(
                        "row script index {r} out of range for {rows} rows"
                    ))),
                    None => Ok(()),
                }
            }
        }
    }
}

/// Sampling configuration shared by the estimators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McOptions {
    pub mode: SamplerMode,
    pub seed: u64,
    /// Selects an independent replicate of every stream.
    pub replicate: u64,
}

impl McOptions {
    pub fn new(mode: SamplerMode, seed: u64) -> Self {
        McOptions {
            mode,
            seed,
            replicate: 0,
        }
    }

    pub fn with_replicate(mut self, replicate: u64) -> Self {
        self.replicate = replicate;
        self
    }
}

/// Monte Carlo attributions with their accumulators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub attribution: AttributionVector,
    pub estimates: Vec<Estimate>,
}

impl McResult {
    fn new(
        ctx: &ExplainContext,
        kind: ValueKind,
        opts: &McOptions,
        estimates: Vec<Estimate>,
    ) -> Self {
        McResult {
            attribution: AttributionVector {
                values: estimates.iter().map(Estimate::mean).collect(),
                stderr: Some(estimates.iter().map(Estimate::stderr).collect()),
                target: ctx.x_star().to_vec(),
                kind,
                mode: opts.mode.mode(),
            },
            estimates,
        }
    }
}

fn at_draw(e: Error, k: u64) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!("draw {}: {msg}", k + 1)),
        other => other,
    }
}

/// Runs `step(row, rng, buf)` once per draw and accumulates its output.
///
/// In empirical mode the row index is drawn before `step` consumes the
/// stream, so the coalition draws line up across modes.
fn run_chain<F>(
    ctx: &ExplainContext,
    opts: &McOptions,
    id: StreamId,
    buf: &mut [f64],
    mut step: F,
) -> Result<Estimate>
where
    F: FnMut(&[f64], &mut ChaCha8Rng, &mut [f64]) -> Result<f64>,
{
    let data = ctx.data();
    opts.mode.validate(data.len())?;
    let mut rng = stream_rng(opts.seed, id);
    let mut est = Estimate::new();
    match &opts.mode {
        SamplerMode::TrueMarginal => {
            for (k, row) in data.rows().enumerate() {
                let d = step(row, &mut rng, buf).map_err(|e| at_draw(e, k as u64))?;
                est.push_unchecked(d);
            }
        }
        SamplerMode::EmpiricalMarginal { iterations } => {
            let rows = data.len() as u64;
            for k in 0..*iterations {
                let r = rng.gen_range(0..rows) as usize;
                let d = step(data.row(r), &mut rng, buf).map_err(|e| at_draw(e, k))?;
                est.push_unchecked(d);
            }
        }
        SamplerMode::Scripted { rows } => {
            for (k, &r) in rows.iter().enumerate() {
                let d = step(data.row(r), &mut rng, buf).map_err(|e| at_draw(e, k as u64))?;
                est.push_unchecked(d);
            }
        }
    }
    Ok(est)
}

fn check_partition(ctx: &ExplainContext, partition: &Partition) -> Result<()> {
    if partition.n() != ctx.n() {
        return Err(Error::contract(format!(
            "partition covers {} features, model has {}",
            partition.n(),
            ctx.n()
        )));
    }
    Ok(())
}

fn linear_estimate(
    ctx: &ExplainContext,
    scheme: &WeightScheme,
    i: usize,
    opts: &McOptions,
    buf: &mut [f64],
) -> Result<Estimate> {
    let sampler = CoalitionSampler::for_scheme(scheme, i, ctx.n())?;
    let bit = 1u64 << i;
    let id = StreamId::new(StreamKind::GameValue, i, opts.replicate);
    run_chain(ctx, opts, id, buf, |x, rng, buf| {
        let s = sampler.sample_bits(rng);
        Ok(ctx.eval_masked(s | bit, x, buf)? - ctx.eval_masked(s, x, buf)?)
    })
}

/// Linear game value of feature `i`: the mean of `f(x*_{S∪i}, x_{-(S∪i)}) - f(x*_S, x_{-S})`.
pub fn estimate_linear(
    ctx: &ExplainContext,
    scheme: &WeightScheme,
    i: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    linear_estimate(ctx, scheme, i, opts, &mut vec![0.0; ctx.n()])
}

fn quotient_estimate(
    ctx: &ExplainContext,
    partition: &Partition,
    scheme: &WeightScheme,
    j: usize,
    opts: &McOptions,
    buf: &mut [f64],
) -> Result<Estimate> {
    let sampler = CoalitionSampler::for_scheme(scheme, j, partition.m())?;
    let group = partition.group(j).bits();
    let id = StreamId::new(StreamKind::GameValue, j, opts.replicate);
    run_chain(ctx, opts, id, buf, |x, rng, buf| {
        let q = partition
            .union_of_groups_bits(sampler.sample_bits(rng))
            .bits();
        Ok(ctx.eval_masked(q | group, x, buf)? - ctx.eval_masked(q, x, buf)?)
    })
}

/// Quotient game value of group `j`.
pub fn estimate_quotient(
    ctx: &ExplainContext,
    partition: &Partition,
    scheme: &WeightScheme,
    j: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    check_partition(ctx, partition)?;
    quotient_estimate(ctx, partition, scheme, j, opts, &mut vec![0.0; ctx.n()])
}

fn coalitional_estimate(
    ctx: &ExplainContext,
    partition: &Partition,
    cw: &CoalitionalWeightScheme,
    i: usize,
    opts: &McOptions,
    buf: &mut [f64],
) -> Result<Estimate> {
    let j = partition.group_of(i);
    let s = partition.group(j).len();
    let outer = CoalitionSampler::for_scheme(&cw.outer, j, partition.m())?;
    let inner = CoalitionSampler::for_scheme(&cw.inner, partition.local_index(i), s)?;
    let bit = 1u64 << i;
    let id = StreamId::new(StreamKind::Coalitional, i, opts.replicate);
    run_chain(ctx, opts, id, buf, |x, rng, buf| {
        let q = partition
            .union_of_groups_bits(outer.sample_bits(rng))
            .bits();
        let t = partition.lift_local(j, inner.sample_bits(rng));
        let base = q | t;
        Ok(ctx.eval_masked(base | bit, x, buf)? - ctx.eval_masked(base, x, buf)?)
    })
}

/// Coalitional value of feature `i`: groups drawn by the outer scheme, members by the inner one.
pub fn estimate_coalitional(
    ctx: &ExplainContext,
    partition: &Partition,
    cw: &CoalitionalWeightScheme,
    i: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    check_partition(ctx, partition)?;
    check_feature(ctx, i)?;
    coalitional_estimate(ctx, partition, cw, i, opts, &mut vec![0.0; ctx.n()])
}

fn two_step_estimate(
    ctx: &ExplainContext,
    partition: &Partition,
    i: usize,
    opts: &McOptions,
    buf: &mut [f64],
) -> Result<Estimate> {
    let j = partition.group_of(i);
    let s = partition.group(j).len();
    if s == 1 {
        return quotient_estimate(ctx, partition, &WeightScheme::Shapley, j, opts, buf);
    }
    let m = partition.m();
    let li = partition.local_index(i);
    let group = partition.group(j).bits();
    let bit = 1u64 << i;
    let size = s as f64;
    let id = StreamId::new(StreamKind::TwoStep, i, opts.replicate);
    run_chain(ctx, opts, id, buf, |x, rng, buf| {
        let f_j = ctx.eval_masked(group, x, buf)?;
        let q = partition
            .union_of_groups_bits(permutation_predecessors(j, m, rng))
            .bits();
        let delta_j = ctx.eval_masked(q | group, x, buf)? - ctx.eval_masked(q, x, buf)?;
        let t = partition.lift_local(j, permutation_predecessors(li, s, rng));
        let delta_i = ctx.eval_masked(t | bit, x, buf)? - ctx.eval_masked(t, x, buf)?;
        Ok(delta_i + (delta_j - f_j) / size)
    })
}

/// Two-step Shapley value of feature `i`.
///
/// Members of singleton groups get the quotient Shapley estimate of their
/// group. Otherwise each draw contributes
/// `Δ_i(S) + (Δ_j(A) - f(x*_{S_j}, x_{-S_j})) / |S_j|`.
pub fn estimate_two_step(
    ctx: &ExplainContext,
    partition: &Partition,
    i: usize,
    opts: &McOptions,
) -> Result<Estimate> {
    check_partition(ctx, partition)?;
    check_feature(ctx, i)?;
    two_step_estimate(ctx, partition, i, opts, &mut vec![0.0; ctx.n()])
}

fn check_feature(ctx: &ExplainContext, i: usize) -> Result<()> {
    if i >= ctx.n() {
        return Err(Error::contract(format!(
            "feature {i} out of range for {} features",
            ctx.n()
        )));
    }
    Ok(())
}

/// Linear game value of every feature.
pub fn mc_linear_value(
    ctx: &ExplainContext,
    scheme: &WeightScheme,
    opts: &McOptions,
) -> Result<McResult> {
    let estimates = map_indices(ctx.n(), ctx.n(), |buf, i| {
        linear_estimate(ctx, scheme, i, opts, buf)
    })?;
    Ok(McResult::new(
        ctx,
        ValueKind::linear(scheme),
        opts,
        estimates,
    ))
}

/// Quotient game value of every group.
pub fn mc_quotient_value(
    ctx: &ExplainContext,
    partition: &Partition,
    scheme: &WeightScheme,
    opts: &McOptions,
) -> Result<McResult> {
    check_partition(ctx, partition)?;
    let estimates = map_indices(partition.m(), ctx.n(), |buf, j| {
        quotient_estimate(ctx, partition, scheme, j, opts, buf)
    })?;
    Ok(McResult::new(
        ctx,
        ValueKind::quotient(scheme),
        opts,
        estimates,
    ))
}

/// Coalitional value of every feature.
pub fn mc_coalitional_value(
    ctx: &ExplainContext,
    partition: &Partition,
    cw: &CoalitionalWeightScheme,
    opts: &McOptions,
) -> Result<McResult> {
    check_partition(ctx, partition)?;
    let estimates = map_indices(ctx.n(), ctx.n(), |buf, i| {
        coalitional_estimate(ctx, partition, cw, i, opts, buf)
    })?;
    Ok(McResult::new(
        ctx,
        ValueKind::coalitional(cw),
        opts,
        estimates,
    ))
}

/// Two-step Shapley value of every feature.
pub fn mc_two_step(
    ctx: &ExplainContext,
    partition: &Partition,
    opts: &McOptions,
) -> Result<McResult> {
    check_partition(ctx, partition)?;
    let estimates = map_indices(ctx.n(), ctx.n(), |buf, i| {
        two_step_estimate(ctx, partition, i, opts, buf)
    })?;
    Ok(McResult::new(ctx, ValueKind::TwoStep, opts, estimates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::game::{exact_two_step, ExactOptions};
    use crate::model::ModelSpec;

    fn parts(expr: &str, n: usize) -> (ModelSpec, Dataset) {
        let rows = (0..7)
            .map(|k| (0..n).map(|c| (k * (c + 2)) as f64 * 0.37 - 1.0).collect())
            .collect();
        (
            ModelSpec::parse_expression(expr, n).unwrap(),
            Dataset::from_rows(rows).unwrap(),
        )
    }

    fn empirical(k: u64) -> McOptions {
        McOptions::new(SamplerMode::empirical(k).unwrap(), 5)
    }

    #[test]
    fn constant_model_is_zero() {
        let (f, d) = parts("3.5", 3);
        let x = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        for scheme in [WeightScheme::Shapley, WeightScheme::Banzhaf] {
            let r = mc_linear_value(&ctx, &scheme, &empirical(100)).unwrap();
            assert_eq!(r.attribution.values, vec![0.0; 3]);
            assert_eq!(r.attribution.stderr, Some(vec![0.0; 3]));
        }
        let p = Partition::new(3, &[vec![0, 2], vec![1]]).unwrap();
        let r = mc_coalitional_value(&ctx, &p, &CoalitionalWeightScheme::owen(), &empirical(50))
            .unwrap();
        assert_eq!(r.attribution.values, vec![0.0; 3]);
    }

    #[test]
    fn constant_model_two_step_matches_exact() {
        let (f, d) = parts("3.5", 3);
        let x = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let p = Partition::new(3, &[vec![0, 2], vec![1]]).unwrap();
        let mc = mc_two_step(&ctx, &p, &empirical(64)).unwrap();
        let exact = exact_two_step(&ctx, &p, &ExactOptions::default()).unwrap();
        assert_eq!(mc.attribution.values, exact.values);
        assert_eq!(mc.attribution.values, vec![-1.75, 0.0, -1.75]);
        assert_eq!(mc.attribution.stderr, Some(vec![0.0; 3]));
    }

    #[test]
    fn null_player_is_exactly_zero() {
        let (f, d) = parts("x1", 2);
        let x = [1.0, 1.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let r = mc_linear_value(&ctx, &WeightScheme::Shapley, &empirical(500)).unwrap();
        assert_eq!(r.attribution.values[1], 0.0);
    }

    #[test]
    fn single_group_quotient_is_full_difference() {
        let (f, d) = parts("x1*x2 + sin(x3)", 3);
        let x = [0.5, -1.0, 2.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let p = Partition::single_group(3).unwrap();
        let opts = McOptions::new(SamplerMode::TrueMarginal, 1);
        let r = mc_quotient_value(&ctx, &p, &WeightScheme::Shapley, &opts).unwrap();
        let fx = f.evaluate(&x).unwrap();
        let mean_f: f64 =
            d.rows().map(|row| f.evaluate(row).unwrap()).sum::<f64>() / d.len() as f64;
        assert!((r.attribution.values[0] - (fx - mean_f)).abs() < 1e-12);
        assert_eq!(r.estimates[0].count(), d.len() as u64);
    }

    #[test]
    fn singleton_quotient_replays_linear() {
        let (f, d) = parts("exp(x1/3) * x2 - x3^2 + x4", 4);
        let x = [0.3, 1.0, -0.5, 2.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let p = Partition::singletons(4).unwrap();
        for scheme in [WeightScheme::Shapley, WeightScheme::Banzhaf] {
            let opts = empirical(300);
            let lin = mc_linear_value(&ctx, &scheme, &opts).unwrap();
            let quo = mc_quotient_value(&ctx, &p, &scheme, &opts).unwrap();
            assert_eq!(lin.estimates, quo.estimates);
        }
        let opts = empirical(300);
        let two = mc_two_step(&ctx, &p, &opts).unwrap();
        let quo = mc_quotient_value(&ctx, &p, &WeightScheme::Shapley, &opts).unwrap();
        assert_eq!(two.estimates, quo.estimates);
    }

    #[test]
    fn scripted_one_pass_equals_true_marginal() {
        let (f, d) = parts("x1*x2 + x3", 3);
        let x = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let one_pass = McOptions::new(SamplerMode::TrueMarginal, 9);
        let scripted = McOptions::new(
            SamplerMode::Scripted {
                rows: (0..d.len()).collect(),
            },
            9,
        );
        let a = mc_linear_value(&ctx, &WeightScheme::Shapley, &one_pass).unwrap();
        let b = mc_linear_value(&ctx, &WeightScheme::Shapley, &scripted).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_error_names_the_draw() {
        let (f, d) = parts("log(x1)", 1);
        let x = [1.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let err = mc_linear_value(
            &ctx,
            &WeightScheme::Shapley,
            &McOptions::new(SamplerMode::TrueMarginal, 0),
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::Domain(ref m) if m.starts_with("draw 1:")),
            "{err}"
        );
    }

    #[test]
    fn rejects_bad_modes() {
        assert!(SamplerMode::empirical(0).is_err());
        let (f, d) = parts("x1", 1);
        let x = [1.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let opts = McOptions::new(SamplerMode::Scripted { rows: vec![0, 99] }, 0);
        assert!(mc_linear_value(&ctx, &WeightScheme::Shapley, &opts).is_err());
        let opts = McOptions::new(SamplerMode::EmpiricalMarginal { iterations: 0 }, 0);
        assert!(mc_linear_value(&ctx, &WeightScheme::Shapley, &opts).is_err());
    }

    #[test]
    fn replicates_differ_and_repeat() {
        let (f, d) = parts("x1*x2 + x3", 3);
        let x = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let a = mc_linear_value(&ctx, &WeightScheme::Shapley, &empirical(64)).unwrap();
        let b = mc_linear_value(&ctx, &WeightScheme::Shapley, &empirical(64)).unwrap();
        let c = mc_linear_value(
            &ctx,
            &WeightScheme::Shapley,
            &empirical(64).with_replicate(1),
        )
        .unwrap();
        assert_eq!(a, b);
        assert_ne!(a.estimates, c.estimates);
    }
}
