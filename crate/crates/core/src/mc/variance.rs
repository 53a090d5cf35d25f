use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{weight_fn, ExplainContext};
use crate::weights::WeightScheme;

/// Largest feature count [`variance_bound_check`] enumerates over.
pub const VARIANCE_BOUND_LIMIT: usize = 12;

/// Variance of a single Monte Carlo term against its a priori bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceBound {
    /// `Var(Δ_i)` under the joint law of the coalition draw and a uniform background row.
    pub variance: f64,
    /// `max_S w_i(S, N)`.
    pub max_weight: f64,
    /// `Σ_{S ⊆ N} mean_{x ∈ D} f(x*_S, x_{-S})²`.
    pub nu2: f64,
    /// `4 · max_weight · nu2`.
    pub bound: f64,
}

impl VarianceBound {
    pub fn holds(&self) -> bool {
        self.variance <= self.bound * (1.0 + 1e-12) + 1e-300
    }
}

/// Computes `Var(Δ_i)` and the bound `4 · w̄ · ν` by full enumeration.
pub fn variance_bound_check(
    ctx: &ExplainContext,
    scheme: &WeightScheme,
    i: usize,
) -> Result<VarianceBound> {
    let n = ctx.n();
    if n > VARIANCE_BOUND_LIMIT {
        return Err(Error::Limit(format!(
            "variance bound enumerates 2^{n} coalitions; limit is {VARIANCE_BOUND_LIMIT} features"
        )));
    }
    if i >= n {
        return Err(Error::contract(format!(
            "feature {i} out of range for {n} features"
        )));
    }
    let w = weight_fn(scheme, i, n)?;
    let max_weight = scheme.max_weight(i, n)?;
    let data = ctx.data();
    let rows = data.len() as f64;
    let mut buf = vec![0.0; n];

    // f(x*_S, x_{-S}) for every S and row.
    let mut values = Vec::with_capacity((1usize << n) * data.len());
    for s in 0..1u64 << n {
        for row in data.rows() {
            values.push(ctx.eval_masked(s, row, &mut buf)?);
        }
    }
    let value = |s: u64, k: usize| values[s as usize * data.len() + k];
    let nu2: f64 = values.iter().map(|v| v * v).sum::<f64>() / rows;

    let bit = 1u64 << i;
    let subsets: Vec<u64> = (0..1u64 << n).filter(|s| s & bit == 0).collect();
    let delta = |s: u64, k: usize| value(s | bit, k) - value(s, k);
    let mut mean = 0.0;
    for &s in &subsets {
        let ws = w(s) / rows;
        for k in 0..data.len() {
            mean += ws * delta(s, k);
        }
    }
    let mut variance = 0.0;
    for &s in &subsets {
        let ws = w(s) / rows;
        for k in 0..data.len() {
            let d = delta(s, k) - mean;
            variance += ws * d * d;
        }
    }
    Ok(VarianceBound {
        variance,
        max_weight,
        nu2,
        bound: 4.0 * max_weight * nu2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::model::ModelSpec;

    #[test]
    fn constant_model() {
        let f = ModelSpec::parse_expression("2", 3).unwrap();
        let d = Dataset::from_rows(vec![vec![0.0; 3], vec![1.0; 3]]).unwrap();
        let x = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let b = variance_bound_check(&ctx, &WeightScheme::Shapley, 0).unwrap();
        assert_eq!(b.variance, 0.0);
        assert_eq!(b.nu2, 8.0 * 4.0);
        assert!((b.bound - 4.0 / 3.0 * 32.0).abs() < 1e-12);
        assert!(b.holds());
    }

    #[test]
    fn two_by_two_sample_space() {
        // Δ_1 = x*_1 - x_1 for every S: values 1 and -1 with equal probability.
        let f = ModelSpec::parse_expression("x1", 2).unwrap();
        let d = Dataset::from_rows(vec![vec![0.0, 0.0], vec![2.0, 2.0]]).unwrap();
        let x = [1.0, 1.0];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        let b = variance_bound_check(&ctx, &WeightScheme::Shapley, 0).unwrap();
        assert!((b.variance - 1.0).abs() < 1e-15);
        // ν = 2 · mean(0², 2²) + 2 · 1² = 6, w̄ = 1/2.
        assert!((b.nu2 - 6.0).abs() < 1e-15);
        assert!((b.bound - 12.0).abs() < 1e-15);
        assert!(b.holds());
    }

    #[test]
    fn limit() {
        let f = ModelSpec::parse_expression("x1", 13).unwrap();
        let d = Dataset::from_rows(vec![vec![0.0; 13]]).unwrap();
        let x = [0.0; 13];
        let ctx = ExplainContext::new(&f, &d, &x).unwrap();
        assert!(matches!(
            variance_bound_check(&ctx, &WeightScheme::Shapley, 0),
            Err(Error::Limit(_))
        ));
    }
}
