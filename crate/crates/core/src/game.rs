//! Empirical marginal games and brute-force game values.
//!
//! For an explained point `x*`, a model `f` and a background dataset `D`,
//! the empirical marginal game is
//!
//! ```text
//! v(S) = (1/|D|) Σ_{x ∈ D} f(x*_S, x_{-S})
//! ```
//!
//! The exact oracles enumerate every coalition a value needs, evaluate each
//! `v(S)` once into a table indexed by bitmask, and then form the weighted
//! marginal differences. They cost `2^n · |D|` model calls and are capped by
//! [`ExactOptions::limit`].

use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, Partition};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::par::map_indices;
use crate::weights::{shapley_weight, CoalitionalWeightScheme, WeightScheme};

/// Default cap on the number of players an exact oracle enumerates over.
pub const DEFAULT_EXACT_LIMIT: usize = 20;

/// The model, background dataset and explained point shared by every value computation.
#[derive(Clone, Copy, Debug)]
pub struct ExplainContext<'a> {
    model: &'a ModelSpec,
    data: &'a Dataset,
    x_star: &'a [f64],
}

impl<'a> ExplainContext<'a> {
    pub fn new(model: &'a ModelSpec, data: &'a Dataset, x_star: &'a [f64]) -> Result<Self> {
        let n = model.n();
        if data.n_features() != n {
            return Err(Error::contract(format!(
                "dataset has {} features, model expects {n}",
                data.n_features()
            )));
        }
        if x_star.len() != n {
            return Err(Error::contract(format!(
                "explained point has {} coordinates, model expects {n}",
                x_star.len()
            )));
        }
        if x_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("explained point has non-finite coordinates"));
        }
        if data.is_empty() {
            return Err(Error::data("background dataset is empty"));
        }
        Ok(ExplainContext {
            model,
            data,
            x_star,
        })
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn model(&self) -> &'a ModelSpec {
        self.model
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn x_star(&self) -> &'a [f64] {
        self.x_star
    }

    /// `f(x*_S, x_{-S})` using `buf` as scratch; errors on a non-finite model output.
    #[inline]
    pub(crate) fn eval_masked(&self, bits: u64, x: &[f64], buf: &mut [f64]) -> Result<f64> {
        compose_into(self.x_star, x, bits, buf);
        let v = self.model.eval_raw(buf);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("model evaluates to {v} at {buf:?}")))
        }
    }

    /// `v(S)` of the empirical marginal game.
    pub(crate) fn game_value(&self, bits: u64, buf: &mut [f64]) -> Result<f64> {
        let mut total = 0.0;
        for (k, row) in self.data.rows().enumerate() {
            compose_into(self.x_star, row, bits, buf);
            let v = self.model.eval_raw(buf);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "model evaluates to {v} on background row {} (coalition {bits:#b})",
                    k + 1
                )));
            }
            total += v;
        }
        Ok(total / self.data.len() as f64)
    }
}

#[inline]
pub(crate) fn compose_into(x_star: &[f64], x: &[f64], bits: u64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = if bits >> i & 1 == 1 { x_star[i] } else { x[i] };
    }
}

/// `(x*_S, x_{-S})`: coordinate `i` from `x_star` when `i ∈ S`, otherwise from `x`.
pub fn compose(x_star: &[f64], x: &[f64], s: Coalition) -> Result<Vec<f64>> {
    if x_star.len() != x.len() || s.width() != x.len() {
        return Err(Error::contract(format!(
            "compose needs equal lengths: x* {}, x {}, coalition width {}",
            x_star.len(),
            x.len(),
            s.width()
        )));
    }
    let mut out = vec![0.0; x.len()];
    compose_into(x_star, x, s.bits(), &mut out);
    Ok(out)
}

/// `(1/|D|) Σ_{x ∈ D} f(x*_S, x_{-S})`.
pub fn empirical_marginal_game(s: Coalition, ctx: &ExplainContext) -> Result<f64> {
    if s.width() != ctx.n() {
        return Err(Error::contract(format!(
            "coalition width {} does not match {} features",
            s.width(),
            ctx.n()
        )));
    }
    let mut buf = vec![0.0; ctx.n()];
    ctx.game_value(s.bits(), &mut buf)
}

/// Which game value an attribution vector holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    Shapley,
    Banzhaf,
    /// Linear game value with an explicit weight table.
    Linear,
    QuotientShapley,
    QuotientBanzhaf,
    Quotient,
    Owen,
    BanzhafOwen,
    Coalitional,
    TwoStep,
}

impl ValueKind {
    pub fn linear(scheme: &WeightScheme) -> Self {
        match scheme {
            WeightScheme::Shapley => ValueKind::Shapley,
            WeightScheme::Banzhaf => ValueKind::Banzhaf,
            WeightScheme::Table(_) => ValueKind::Linear,
        }
    }

    pub fn quotient(scheme: &WeightScheme) -> Self {
        match scheme {
            WeightScheme::Shapley => ValueKind::QuotientShapley,
            WeightScheme::Banzhaf => ValueKind::QuotientBanzhaf,
            WeightScheme::Table(_) => ValueKind::Quotient,
        }
    }

    pub fn coalitional(cw: &CoalitionalWeightScheme) -> Self {
        if *cw == CoalitionalWeightScheme::owen() {
            ValueKind::Owen
        } else if *cw == CoalitionalWeightScheme::banzhaf_owen() {
            ValueKind::BanzhafOwen
        } else {
            ValueKind::Coalitional
        }
    }

    /// Whether the vector is indexed by groups rather than features.
    pub fn per_group(self) -> bool {
        matches!(
            self,
            ValueKind::QuotientShapley | ValueKind::QuotientBanzhaf | ValueKind::Quotient
        )
    }
}

/// How the values were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    /// Monte Carlo, one pass over the background data; targets the marginal game of the data generator.
    TrueMarginal,
    /// Monte Carlo with rows resampled from the background data; targets the empirical marginal game.
    EmpiricalMarginal,
}

/// The game a value is taken of.
///
/// Conditional games are named for completeness; nothing in this crate computes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    EmpiricalMarginal,
    Marginal,
    Conditional,
}

/// Per-feature or per-group attributions for one explained point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributionVector {
    pub values: Vec<f64>,
    /// Monte Carlo standard errors, one per value; absent for exact values.
    pub stderr: Option<Vec<f64>>,
    pub target: Vec<f64>,
    pub kind: ValueKind,
    pub mode: Mode,
}

impl AttributionVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn game(&self) -> GameKind {
        match self.mode {
            Mode::Exact | Mode::EmpiricalMarginal => GameKind::EmpiricalMarginal,
            Mode::TrueMarginal => GameKind::Marginal,
        }
    }
}

/// Options for the brute-force oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Largest number of players (features, groups, or group members) enumerated over.
    pub limit: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

fn check_limit(what: &str, players: usize, opts: &ExactOptions) -> Result<()> {
    if players > opts.limit {
        return Err(Error::Limit(format!(
            "exact {what} over {players} players needs 2^{players} = {} game evaluations, \
             above the limit of 2^{}; raise the limit or use Monte Carlo estimation",
            1u128 << players.min(127),
            opts.limit
        )));
    }
    Ok(())
}

/// Evaluates `v` on `count` coalitions produced by `coalition(index)`.
fn game_table<F>(ctx: &ExplainContext, count: usize, coalition: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    map_indices(count, ctx.n(), |buf, k| ctx.game_value(coalition(k), buf))
}

/// Sum that does not depend on the order the terms were produced in.
///
/// Terms are sorted before a compensated summation, so relabelling the
/// players permutes the terms without changing a single bit of the result.
pub(crate) fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Weight function `w(S)` of a scheme for player `i` over `n` players, as a closure over bitmasks.
pub(crate) fn weight_fn<'s>(
    scheme: &'s WeightScheme,
    i: usize,
    n: usize,
) -> Result<impl Fn(u64) -> f64 + 's> {
    let by_size: Option<Vec<f64>> = match scheme {
        WeightScheme::Table(crate::weights::ExplicitTable::Coalition { .. }) => None,
        _ => Some((0..n).map(|s| scheme.weight(s, n)).collect::<Result<_>>()?),
    };
    // Validates the table width once.
    if n > 0 {
        scheme.weight_of(i, Coalition::from_bits_unchecked(0, n))?;
    }
    Ok(move |bits: u64| match &by_size {
        Some(w) => w[bits.count_ones() as usize],
        None => scheme
            .weight_of(i, Coalition::from_bits_unchecked(bits, n))
            .unwrap_or(0.0),
    })
}

/// `Σ_{S ⊆ P∖{i}} w(S) [t(S ∪ {i}) - t(S)]` over a table indexed by subsets of `n` players.
fn linear_value_from_table(table: &[f64], i: usize, n: usize, w: impl Fn(u64) -> f64) -> f64 {
    let bit = 1u64 << i;
    let terms = (0..1u64 << n)
        .filter(|s| s & bit == 0)
        .map(|s| w(s) * (table[(s | bit) as usize] - table[s as usize]))
        .collect();
    canonical_sum(terms)
}

fn linear_values_from_table(table: &[f64], n: usize, scheme: &WeightScheme) -> Result<Vec<f64>> {
    (0..n)
        .map(|i| {
            Ok(linear_value_from_table(
                table,
                i,
                n,
                weight_fn(scheme, i, n)?,
            ))
        })
        .collect()
}

/// `h_i = Σ_{S ⊆ N∖{i}} w_i(S, N) [v(S ∪ {i}) - v(S)]` for every feature.
pub fn exact_linear_value(
    ctx: &ExplainContext,
    scheme: &WeightScheme,
    opts: &ExactOptions,
) -> Result<AttributionVector> {
    let n = ctx.n();
    check_limit("linear game value", n, opts)?;
    let table = game_table(ctx, 1 << n, |k| k as u64)?;
    Ok(AttributionVector {
        values: linear_values_from_table(&table, n, scheme)?,
        stderr: None,
        target: ctx.x_star().to_vec(),
        kind: ValueKind::linear(scheme),
        mode: Mode::Exact,
    })
}

/// `v(Q_A)` for every `A ⊆ M`.
fn quotient_table(ctx: &ExplainContext, partition: &Partition) -> Result<Vec<f64>> {
    game_table(ctx, 1 << partition.m(), |a| {
        partition.union_of_groups_bits(a as u64).bits()
    })
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

/// `h_j = Σ_{A ⊆ M∖{j}} w_j(A, M) [v(Q_{A ∪ {j}}) - v(Q_A)]` for every group.
pub fn exact_quotient_value(
    ctx: &ExplainContext,
    partition: &Partition,
    scheme: &WeightScheme,
    opts: &ExactOptions,
) -> Result<AttributionVector> {
    check_partition(ctx, partition)?;
    let m = partition.m();
    check_limit("quotient game value", m, opts)?;
    let table = quotient_table(ctx, partition)?;
    Ok(AttributionVector {
        values: linear_values_from_table(&table, m, scheme)?,
        stderr: None,
        target: ctx.x_star().to_vec(),
        kind: ValueKind::quotient(scheme),
        mode: Mode::Exact,
    })
}

/// Coalitional values of the members of group `j`, in the group's member order.
///
/// `g_i = Σ_{A ⊆ M∖{j}} Σ_{T ⊆ S_j∖{i}} w1_j(A, M) w2_i(T, S_j) [v(Q_A ∪ T ∪ {i}) - v(Q_A ∪ T)]`
pub fn exact_coalitional_group(
    ctx: &ExplainContext,
    partition: &Partition,
    cw: &CoalitionalWeightScheme,
    j: usize,
    opts: &ExactOptions,
) -> Result<Vec<f64>> {
    check_partition(ctx, partition)?;
    let m = partition.m();
    if j >= m {
        return Err(Error::contract(format!(
            "group {j} out of range for {m} groups"
        )));
    }
    let s = partition.group(j).len();
    check_limit("coalitional value (groups)", m, opts)?;
    check_limit("coalitional value (group members)", s, opts)?;
    check_limit("coalitional value (joint enumeration)", m - 1 + s, opts)?;

    let others: Vec<usize> = (0..m).filter(|&g| g != j).collect();
    let lift_others = |a_local: u64| -> u64 {
        let mut a = 0u64;
        let mut rest = a_local;
        while rest != 0 {
            a |= 1 << others[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        a
    };
    let inner_count = 1usize << s;
    let table = game_table(ctx, (1usize << (m - 1)) * inner_count, |k| {
        let a = lift_others((k / inner_count) as u64);
        let t = partition.lift_local(j, (k % inner_count) as u64);
        partition.union_of_groups_bits(a).bits() | t
    })?;

    // Outer weight depends only on A; it is shared by every member of the group.
    let outer = weight_fn(&cw.outer, j, m)?;
    let outer_w: Vec<f64> = (0..1u64 << (m - 1))
        .map(|al| outer(lift_others(al)))
        .collect();

    (0..s)
        .map(|li| {
            let inner = weight_fn(&cw.inner, li, s)?;
            let bit = 1u64 << li;
            let mut terms = Vec::with_capacity((outer_w.len() * inner_count) / 2);
            for (al, w1) in outer_w.iter().enumerate() {
                let row = &table[al * inner_count..(al + 1) * inner_count];
                for t in (0..inner_count as u64).filter(|t| t & bit == 0) {
                    terms.push(w1 * inner(t) * (row[(t | bit) as usize] - row[t as usize]));
                }
            }
            Ok(canonical_sum(terms))
        })
        .collect()
}

/// Coalitional value of every feature.
pub fn exact_coalitional_value(
    ctx: &ExplainContext,
    partition: &Partition,
    cw: &CoalitionalWeightScheme,
    opts: &ExactOptions,
) -> Result<AttributionVector> {
    let mut values = vec![0.0; ctx.n()];
    for j in 0..partition.m() {
        let group = exact_coalitional_group(ctx, partition, cw, j, opts)?;
        for (&i, v) in partition.members(j).iter().zip(group) {
            values[i] = v;
        }
    }
    Ok(AttributionVector {
        values,
        stderr: None,
        target: ctx.x_star().to_vec(),
        kind: ValueKind::coalitional(cw),
        mode: Mode::Exact,
    })
}

/// Exact quotient Shapley values of every group, the shared first step of two-step Shapley.
pub fn exact_quotient_shapley(
    ctx: &ExplainContext,
    partition: &Partition,
    opts: &ExactOptions,
) -> Result<Vec<f64>> {
    Ok(exact_quotient_value(ctx, partition, &WeightScheme::Shapley, opts)?.values)
}

/// Two-step Shapley values of the members of group `j`, given the quotient Shapley value `phi_j`.
///
/// A singleton group receives `phi_j`. Otherwise member `i` receives
/// `φ_i[S_j, v] + (phi_j - v(S_j)) / |S_j|`, where the within-group Shapley
/// value uses the game restricted to subsets of `S_j` (features outside the
/// group always take background values).
pub fn exact_two_step_group(
    ctx: &ExplainContext,
    partition: &Partition,
    j: usize,
    phi_j: f64,
    opts: &ExactOptions,
) -> Result<Vec<f64>> {
    check_partition(ctx, partition)?;
    if j >= partition.m() {
        return Err(Error::contract(format!(
            "group {j} out of range for {} groups",
            partition.m()
        )));
    }
    let s = partition.group(j).len();
    if s == 1 {
        return Ok(vec![phi_j]);
    }
    check_limit("two-step Shapley (group members)", s, opts)?;
    let table = game_table(ctx, 1 << s, |t| partition.lift_local(j, t as u64))?;
    let v_group = table[(1 << s) - 1];
    let weights: Vec<f64> = (0..s).map(|k| shapley_weight(k, s)).collect();
    Ok((0..s)
        .map(|li| {
            let within =
                linear_value_from_table(&table, li, s, |t| weights[t.count_ones() as usize]);
            within + (phi_j - v_group) / s as f64
        })
        .collect())
}

/// Two-step Shapley value of every feature.
pub fn exact_two_step(
    ctx: &ExplainContext,
    partition: &Partition,
    opts: &ExactOptions,
) -> Result<AttributionVector> {
    check_partition(ctx, partition)?;
    check_limit("two-step Shapley (groups)", partition.m(), opts)?;
    let phi = exact_quotient_shapley(ctx, partition, opts)?;
    let mut values = vec![0.0; ctx.n()];
    for (j, &phi_j) in phi.iter().enumerate() {
        let group = exact_two_step_group(ctx, partition, j, phi_j, opts)?;
        for (&i, v) in partition.members(j).iter().zip(group) {
            values[i] = v;
        }
    }
    Ok(AttributionVector {
        values,
        stderr: None,
        target: ctx.x_star().to_vec(),
        kind: ValueKind::TwoStep,
        mode: Mode::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_parts(expr: &str, n: usize, rows: Vec<Vec<f64>>) -> (ModelSpec, Dataset) {
        (
            ModelSpec::parse_expression(expr, n).unwrap(),
            Dataset::from_rows(rows).unwrap(),
        )
    }

    #[test]
    fn compose_examples() {
        let xs = [1.0, 2.0, 3.0];
        let x = [9.0, 9.0, 9.0];
        assert_eq!(compose(&xs, &x, Coalition::empty(3).unwrap()).unwrap(), x);
        assert_eq!(compose(&xs, &x, Coalition::full(3).unwrap()).unwrap(), xs);
        let s = Coalition::from_indices([0, 2], 3).unwrap();
        assert_eq!(compose(&xs, &x, s).unwrap(), [1.0, 9.0, 3.0]);
        assert!(compose(&xs, &x[..2], s).is_err());
    }

    #[test]
    fn marginal_game_examples() {
        let (f, d) = ctx_parts("x1 + x2", 2, vec![vec![0.0, 0.0], vec![2.0, 2.0]]);
        let xs = [5.0, 5.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        let s = Coalition::from_indices([0], 2).unwrap();
        assert_eq!(empirical_marginal_game(s, &ctx).unwrap(), 6.0);
        assert_eq!(
            empirical_marginal_game(Coalition::full(2).unwrap(), &ctx).unwrap(),
            10.0
        );
        // Mean of f over D.
        assert_eq!(
            empirical_marginal_game(Coalition::empty(2).unwrap(), &ctx).unwrap(),
            2.0
        );
    }

    #[test]
    fn domain_error_names_row() {
        let (f, d) = ctx_parts("log(x1)", 1, vec![vec![1.0], vec![-1.0]]);
        let xs = [2.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        match empirical_marginal_game(Coalition::empty(1).unwrap(), &ctx) {
            Err(Error::Domain(msg)) => assert!(msg.contains("row 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn additive_shapley_is_centered_input() {
        let (f, d) = ctx_parts(
            "x1 + x2",
            2,
            vec![vec![0.0, 1.0], vec![2.0, 5.0], vec![1.0, 0.0]],
        );
        let xs = [4.0, -1.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        let h = exact_linear_value(&ctx, &WeightScheme::Shapley, &ExactOptions::default()).unwrap();
        assert!((h.values[0] - (4.0 - 1.0)).abs() < 1e-12);
        assert!((h.values[1] - (-1.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_model_gives_zeros() {
        let (f, d) = ctx_parts("3.5", 3, vec![vec![0.0, 1.0, 2.0], vec![1.0, 1.0, 1.0]]);
        let xs = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        let opts = ExactOptions::default();
        for scheme in [WeightScheme::Shapley, WeightScheme::Banzhaf] {
            let h = exact_linear_value(&ctx, &scheme, &opts).unwrap();
            assert_eq!(h.values, [0.0; 3]);
        }
        let p = Partition::new(3, &[vec![0, 1], vec![2]]).unwrap();
        let g = exact_coalitional_value(&ctx, &p, &CoalitionalWeightScheme::owen(), &opts).unwrap();
        assert_eq!(g.values, [0.0; 3]);
        // Two-step keeps the uncentred group worth: -c/|S_j| for the pair, 0 for the singleton.
        let t = exact_two_step(&ctx, &p, &opts).unwrap();
        assert!((t.values[0] + 1.75).abs() < 1e-15);
        assert!((t.values[1] + 1.75).abs() < 1e-15);
        assert_eq!(t.values[2], 0.0);
    }

    #[test]
    fn quotient_with_one_group() {
        let (f, d) = ctx_parts(
            "x1 * x2 + x3",
            3,
            vec![vec![0.0, 1.0, 2.0], vec![3.0, 1.0, -1.0]],
        );
        let xs = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        let p = Partition::single_group(3).unwrap();
        let h = exact_quotient_value(&ctx, &p, &WeightScheme::Shapley, &ExactOptions::default())
            .unwrap();
        let full = empirical_marginal_game(Coalition::full(3).unwrap(), &ctx).unwrap();
        let none = empirical_marginal_game(Coalition::empty(3).unwrap(), &ctx).unwrap();
        assert_eq!(h.values.len(), 1);
        assert!((h.values[0] - (full - none)).abs() < 1e-12);
    }

    #[test]
    fn limits_are_enforced() {
        let (f, d) = ctx_parts("x1", 3, vec![vec![0.0, 1.0, 2.0]]);
        let xs = [1.0, 2.0, 3.0];
        let ctx = ExplainContext::new(&f, &d, &xs).unwrap();
        let opts = ExactOptions { limit: 2 };
        match exact_linear_value(&ctx, &WeightScheme::Shapley, &opts) {
            Err(Error::Limit(msg)) => assert!(msg.contains("2^3")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_sum_ignores_order() {
        let a = vec![1e16, 1.0, -1e16, 3.25, 1e-3, -7.5];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(canonical_sum(a).to_bits(), canonical_sum(b).to_bits());
    }
}
