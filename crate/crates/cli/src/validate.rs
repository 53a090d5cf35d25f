use std::fs::File;
use std::io::{self, BufWriter, Write};

use mcgame::game::{
    empirical_marginal_game, exact_coalitional_value, exact_linear_value, exact_quotient_value,
    exact_two_step, DEFAULT_EXACT_LIMIT,
};
use mcgame::mc::{variance_bound_check, VARIANCE_BOUND_LIMIT};
use mcgame::{
    Coalition, CoalitionalWeightScheme, ExactOptions, ExplainContext, Partition, WeightScheme,
};
use serde::Serialize;
use serde_json::json;

use crate::args::ValidateArgs;
use crate::inputs::{Inputs, ObservationLabel};
use crate::CliError;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    observation: ObservationLabel,
    passed: bool,
    detail: String,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
}

fn all_close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y))
}

fn worst_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Checks at one observation. Returns the list of results.
fn checks_at(
    inputs: &Inputs,
    label: &ObservationLabel,
    x: &[f64],
    opts: &ExactOptions,
) -> Result<Vec<Check>, CliError> {
    let n = inputs.model.n();
    let ctx = ExplainContext::new(&inputs.model, &inputs.data, x)?;
    let mut out = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        out.push(Check {
            name,
            observation: label.clone(),
            passed,
            detail,
        })
    };

    let shapley = exact_linear_value(&ctx, &WeightScheme::Shapley, opts)?.values;
    let banzhaf = exact_linear_value(&ctx, &WeightScheme::Banzhaf, opts)?.values;
    let total = empirical_marginal_game(Coalition::full(n)?, &ctx)?
        - empirical_marginal_game(Coalition::empty(n)?, &ctx)?;
    let sum: f64 = shapley.iter().sum();
    push(
        "efficiency",
        close(sum, total),
        format!("sum of Shapley values {sum:?}, v(N) - v(empty) = {total:?}"),
    );

    let referenced = inputs.model.referenced_features();
    let nulls: Vec<usize> = (0..n).filter(|&i| !referenced.contains(i)).collect();
    let null_ok = nulls
        .iter()
        .all(|&i| shapley[i] == 0.0 && banzhaf[i] == 0.0);
    push(
        "null player",
        null_ok,
        format!("{} features unused by the model", nulls.len()),
    );

    // Reversing the feature order must reverse the values bit for bit.
    let perm: Vec<usize> = (0..n).rev().collect();
    let model_r = inputs.model.permute_features(&perm)?;
    let data_r = inputs.data.permute_columns(&perm)?;
    let x_r: Vec<f64> = perm.iter().map(|&c| x[c]).collect();
    let ctx_r = ExplainContext::new(&model_r, &data_r, &x_r)?;
    let shapley_r = exact_linear_value(&ctx_r, &WeightScheme::Shapley, opts)?.values;
    let relabel_ok = perm
        .iter()
        .enumerate()
        .all(|(c, &old)| shapley_r[c] == shapley[old]);
    push(
        "relabelling symmetry",
        relabel_ok,
        "Shapley values follow a reversal of the feature order".to_string(),
    );

    let singletons = Partition::singletons(n)?;
    let owen_single =
        exact_coalitional_value(&ctx, &singletons, &CoalitionalWeightScheme::owen(), opts)?.values;
    push(
        "owen with singleton groups equals shapley",
        all_close(&owen_single, &shapley),
        format!("largest gap {:e}", worst_gap(&owen_single, &shapley)),
    );
    let whole = Partition::single_group(n)?;
    let owen_whole =
        exact_coalitional_value(&ctx, &whole, &CoalitionalWeightScheme::owen(), opts)?.values;
    push(
        "owen with one group equals shapley",
        all_close(&owen_whole, &shapley),
        format!("largest gap {:e}", worst_gap(&owen_whole, &shapley)),
    );
    let two_single = exact_two_step(&ctx, &singletons, opts)?.values;
    let quotient_single =
        exact_quotient_value(&ctx, &singletons, &WeightScheme::Shapley, opts)?.values;
    push(
        "two-step with singleton groups equals quotient shapley",
        all_close(&two_single, &quotient_single),
        format!("largest gap {:e}", worst_gap(&two_single, &quotient_single)),
    );

    if let Some(p) = &inputs.partition {
        let quotient = exact_quotient_value(&ctx, p, &WeightScheme::Shapley, opts)?.values;
        let owen = exact_coalitional_value(&ctx, p, &CoalitionalWeightScheme::owen(), opts)?.values;
        let group_sums: Vec<f64> = (0..p.m())
            .map(|j| p.members(j).iter().map(|&i| owen[i]).sum())
            .collect();
        push(
            "owen group sums equal quotient shapley",
            all_close(&group_sums, &quotient),
            format!("largest gap {:e}", worst_gap(&group_sums, &quotient)),
        );
        let qsum: f64 = quotient.iter().sum();
        push(
            "quotient efficiency",
            close(qsum, total),
            format!("sum {qsum:?}, v(N) - v(empty) = {total:?}"),
        );
    }

    if n <= VARIANCE_BOUND_LIMIT {
        let mut worst = 0.0f64;
        let mut ok = true;
        for i in 0..n {
            let b = variance_bound_check(&ctx, &WeightScheme::Shapley, i)?;
            ok &= b.holds();
            if b.bound > 0.0 {
                worst = worst.max(b.variance / b.bound);
            }
        }
        push(
            "variance bound",
            ok,
            format!("largest ratio of variance to bound {worst:.4}"),
        );
    }
    Ok(out)
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let inputs = Inputs::load(&args.input)?;
    let opts = ExactOptions {
        limit: args.limit.unwrap_or(DEFAULT_EXACT_LIMIT),
    };
    let mut checks = Vec::new();
    for k in 0..inputs.observation_count() {
        let (label, x) = inputs.observation(k);
        checks.extend(checks_at(&inputs, &label, x, &opts)?);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let report = json!({
        "config": {
            "command": "validate",
            "model": inputs.model.to_config(),
            "data": { "path": inputs.data_path, "rows": inputs.data.len() },
            "observation": inputs.observation_config(),
            "partition": inputs.partition,
            "limit": opts.limit,
        },
        "checks": checks,
        "failed": failed,
    });
    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::usage(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("FAILED {} at {:?}: {}", c.name, c.observation, c.detail);
    }
    if failed > 0 {
        return Err(CliError::Invariant(format!("{failed} checks failed")));
    }
    Ok(())
}
