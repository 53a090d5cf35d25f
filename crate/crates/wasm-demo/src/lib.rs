//! Browser bindings for three demo operations: exact against sampled
//! attributions, a convergence curve, and sampler frequencies.
//!
//! The plain functions return serde types and are tested natively. The
//! `#[wasm_bindgen]` wrappers hand JavaScript a JSON string.

use mcgame::experiments::{run_convergence, ConvergenceSummary, ExperimentId, ExperimentSpec};
use mcgame::game::{
    exact_coalitional_value, exact_linear_value, exact_quotient_value, exact_two_step,
};
use mcgame::mc::{
    mc_coalitional_value, mc_linear_value, mc_quotient_value, mc_two_step,
    sample_coalition_bernoulli, sample_coalition_permutation, stream_rng, StreamId, StreamKind,
};
use mcgame::weights::{banzhaf_weight, binomial, shapley_weight};
use mcgame::{
    CoalitionalWeightScheme, Dataset, ExactOptions, ExplainContext, McOptions, ModelSpec,
    Partition, SamplerMode, WeightScheme,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest player count the demo enumerates over.
pub const DEMO_EXACT_LIMIT: usize = 12;

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub labels: Vec<String>,
    pub exact: Vec<f64>,
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub iterations: u64,
}

fn parse_point(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot read {s:?} as a number"))
        })
        .collect()
}

/// Exact values next to Monte Carlo estimates for one point.
///
/// `value` is one of shapley, banzhaf, quotient, owen, banzhaf-owen, two-step.
/// `partition` is a JSON list of 1-based index lists and may be empty for
/// the linear values.
pub fn compare(
    expression: &str,
    data_csv: &str,
    point: &str,
    partition: &str,
    value: &str,
    iterations: u64,
    seed: u64,
) -> Result<Comparison, String> {
    let data = Dataset::from_csv_reader(data_csv.as_bytes()).map_err(|e| e.to_string())?;
    let n = data.n_features();
    if n > DEMO_EXACT_LIMIT {
        return Err(format!(
            "the demo handles up to {DEMO_EXACT_LIMIT} features, got {n}"
        ));
    }
    let model = ModelSpec::parse_expression(expression, n).map_err(|e| e.to_string())?;
    let x = parse_point(point)?;
    let ctx = ExplainContext::new(&model, &data, &x).map_err(|e| e.to_string())?;
    let exact_opts = ExactOptions {
        limit: DEMO_EXACT_LIMIT,
    };
    let opts = McOptions::new(
        SamplerMode::empirical(iterations).map_err(|e| e.to_string())?,
        seed,
    );
    let groups = || -> Result<Partition, String> {
        if partition.trim().is_empty() {
            return Err(format!("{value} needs a partition"));
        }
        Partition::from_json(n, partition).map_err(|e| e.to_string())
    };
    let (exact, mc, labels) = match value {
        "shapley" | "banzhaf" => {
            let scheme = if value == "shapley" {
                WeightScheme::Shapley
            } else {
                WeightScheme::Banzhaf
            };
            let e = exact_linear_value(&ctx, &scheme, &exact_opts);
            let m = mc_linear_value(&ctx, &scheme, &opts);
            (
                e.map_err(|e| e.to_string())?,
                m.map_err(|e| e.to_string())?.attribution,
                data.names().to_vec(),
            )
        }
        "quotient" => {
            let p = groups()?;
            let labels = (1..=p.m()).map(|j| format!("S{j}")).collect();
            let e = exact_quotient_value(&ctx, &p, &WeightScheme::Shapley, &exact_opts);
            let m = mc_quotient_value(&ctx, &p, &WeightScheme::Shapley, &opts);
            (
                e.map_err(|e| e.to_string())?,
                m.map_err(|e| e.to_string())?.attribution,
                labels,
            )
        }
        "owen" | "banzhaf-owen" => {
            let p = groups()?;
            let cw = if value == "owen" {
                CoalitionalWeightScheme::owen()
            } else {
                CoalitionalWeightScheme::banzhaf_owen()
            };
            let e = exact_coalitional_value(&ctx, &p, &cw, &exact_opts);
            let m = mc_coalitional_value(&ctx, &p, &cw, &opts);
            (
                e.map_err(|e| e.to_string())?,
                m.map_err(|e| e.to_string())?.attribution,
                data.names().to_vec(),
            )
        }
        "two-step" => {
            let p = groups()?;
            let e = exact_two_step(&ctx, &p, &exact_opts);
            let m = mc_two_step(&ctx, &p, &opts);
            (
                e.map_err(|e| e.to_string())?,
                m.map_err(|e| e.to_string())?.attribution,
                data.names().to_vec(),
            )
        }
        other => return Err(format!("unknown value {other:?}")),
    };
    Ok(Comparison {
        labels,
        exact: exact.values,
        stderr: mc.stderr.unwrap_or_default(),
        estimate: mc.values,
        iterations,
    })
}

/// A reduced convergence study: `runs` runs over `K ∈ {2^9, …, 2^kmax}`.
pub fn convergence(
    experiment: &str,
    runs: usize,
    kmax: u32,
    seed: u64,
) -> Result<ConvergenceSummary, String> {
    let id: ExperimentId = experiment
        .parse()
        .map_err(|e: mcgame::Error| e.to_string())?;
    if !(9..=14).contains(&kmax) {
        return Err(format!("kmax must be between 9 and 14, got {kmax}"));
    }
    let mut spec = ExperimentSpec::new(id, seed);
    spec.runs = runs;
    spec.k_grid = (9..=kmax).map(|r| 1u64 << r).collect();
    Ok(run_convergence(&spec).map_err(|e| e.to_string())?.summary)
}

#[derive(Debug, Serialize)]
pub struct SizeFrequencies {
    /// Coalition sizes `0..n`.
    pub sizes: Vec<usize>,
    /// Share of draws with each size.
    pub observed: Vec<f64>,
    /// Total weight the scheme puts on each size.
    pub expected: Vec<f64>,
    pub draws: usize,
}

/// Empirical coalition-size law of a sampler against its weight family.
pub fn sampler_frequencies(
    scheme: &str,
    n: usize,
    i: usize,
    draws: usize,
    seed: u64,
) -> Result<SizeFrequencies, String> {
    let shapley = match scheme {
        "shapley" => true,
        "banzhaf" => false,
        other => return Err(format!("unknown scheme {other:?}")),
    };
    if n == 0 || n > DEMO_EXACT_LIMIT || i >= n {
        return Err(format!("need 1 <= n <= {DEMO_EXACT_LIMIT} and i < n"));
    }
    let mut rng = stream_rng(seed, StreamId::new(StreamKind::Sampler, i, n as u64));
    let mut counts = vec![0usize; n];
    for _ in 0..draws {
        let s = if shapley {
            sample_coalition_permutation(i, n, &mut rng)
        } else {
            sample_coalition_bernoulli(i, n, &mut rng)
        };
        counts[s.map_err(|e| e.to_string())?.len()] += 1;
    }
    let expected = (0..n)
        .map(|s| {
            let w = if shapley {
                shapley_weight(s, n)
            } else {
                banzhaf_weight(n)
            };
            binomial(n - 1, s) as f64 * w
        })
        .collect();
    Ok(SizeFrequencies {
        sizes: (0..n).collect(),
        observed: counts
            .iter()
            .map(|&c| c as f64 / draws.max(1) as f64)
            .collect(),
        expected,
        draws,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = compare)]
pub fn compare_js(
    expression: &str,
    data_csv: &str,
    point: &str,
    partition: &str,
    value: &str,
    iterations: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(compare(
        expression,
        data_csv,
        point,
        partition,
        value,
        iterations.into(),
        seed.into(),
    ))
}

#[wasm_bindgen(js_name = convergence)]
pub fn convergence_js(
    experiment: &str,
    runs: u32,
    kmax: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(convergence(experiment, runs as usize, kmax, seed.into()))
}

#[wasm_bindgen(js_name = samplerFrequencies)]
pub fn sampler_frequencies_js(
    scheme: &str,
    n: u32,
    i: u32,
    draws: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(sampler_frequencies(
        scheme,
        n as usize,
        i as usize,
        draws as usize,
        seed.into(),
    ))
}
