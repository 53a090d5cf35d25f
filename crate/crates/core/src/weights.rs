//! Coefficient families `w_i(S, N)` of linear game values.
//!
//! Every scheme is a probability distribution over the coalitions
//! `S ⊆ N∖{i}`: weights are nonnegative and sum to one for each player.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};

/// Largest ground set for which an explicit weight table is accepted.
pub const TABLE_LIMIT: usize = 20;

const NORMALIZATION_TOL: f64 = 1e-12;

/// `C(n, k)` in exact integer arithmetic. Exact for every `n <= 64`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        // acc * (n - t) is divisible by (t + 1) at every step.
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc
}

/// `s!(n-s-1)!/n!`, the Shapley weight of one coalition of size `s`.
pub fn shapley_weight(s: usize, n: usize) -> f64 {
    // s!(n-s-1)!/n! = 1 / (n * C(n-1, s))
    1.0 / (n as f64 * binomial(n - 1, s) as f64)
}

/// `2^-(n-1)`, the Banzhaf weight of any coalition.
pub fn banzhaf_weight(n: usize) -> f64 {
    0.5f64.powi(n as i32 - 1)
}

/// A user-supplied weight family for a fixed ground-set size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum ExplicitTable {
    /// `weights[s]` is the weight of each coalition of size `s`.
    Size { n: usize, weights: Vec<f64> },
    /// Weight keyed by the coalition bitmask, shared by every player not in it.
    /// Coalitions absent from the map weigh zero.
    Coalition {
        n: usize,
        weights: BTreeMap<u64, f64>,
    },
}

impl ExplicitTable {
    pub fn n(&self) -> usize {
        match self {
            ExplicitTable::Size { n, .. } | ExplicitTable::Coalition { n, .. } => *n,
        }
    }

    fn weight_of(&self, s: Coalition) -> f64 {
        match self {
            ExplicitTable::Size { weights, .. } => weights.get(s.len()).copied().unwrap_or(0.0),
            ExplicitTable::Coalition { weights, .. } => {
                weights.get(&s.bits()).copied().unwrap_or(0.0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || n > TABLE_LIMIT {
            return Err(Error::Limit(format!(
                "explicit weight tables support 1..={TABLE_LIMIT} players, got {n}"
            )));
        }
        let values: Vec<f64> = match self {
            ExplicitTable::Size { weights, .. } => {
                if weights.len() != n {
                    return Err(Error::contract(format!(
                        "size table needs {n} entries (sizes 0..{n}), got {}",
                        weights.len()
                    )));
                }
                weights.clone()
            }
            ExplicitTable::Coalition { weights, .. } => {
                if let Some(bad) = weights.keys().find(|&&b| b >> n != 0) {
                    return Err(Error::contract(format!(
                        "coalition key {bad:#x} has players outside 0..{n}"
                    )));
                }
                weights.values().copied().collect()
            }
        };
        if let Some(w) = values.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::contract(format!(
                "weight {w} is not a nonnegative number"
            )));
        }
        for i in 0..n {
            let total = self.total_for(i);
            if (total - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::contract(format!(
                    "weights for player {} sum to {total}, expected 1",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    fn total_for(&self, i: usize) -> f64 {
        let n = self.n();
        match self {
            ExplicitTable::Size { weights, .. } => weights
                .iter()
                .enumerate()
                .map(|(s, w)| binomial(n - 1, s) as f64 * w)
                .sum(),
            ExplicitTable::Coalition { weights, .. } => weights
                .iter()
                .filter(|(b, _)| *b >> i & 1 == 0)
                .map(|(_, w)| w)
                .sum(),
        }
    }
}

/// The weight family of a linear game value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    Shapley,
    Banzhaf,
    Table(ExplicitTable),
}

impl WeightScheme {
    /// Validates and wraps an explicit table.
    pub fn table(table: ExplicitTable) -> Result<Self> {
        table.validate()?;
        Ok(WeightScheme::Table(table))
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Shapley => "shapley",
            WeightScheme::Banzhaf => "banzhaf",
            WeightScheme::Table(_) => "table",
        }
    }

    /// Weight of a coalition of size `s` in a ground set of `n` players.
    ///
    /// Only meaningful for size-based schemes; a coalition-keyed table
    /// needs [`WeightScheme::weight_of`].
    pub fn weight(&self, s: usize, n: usize) -> Result<f64> {
        if n == 0 || s >= n {
            return Err(Error::contract(format!(
                "coalition size {s} must be below the ground-set size {n}"
            )));
        }
        match self {
            WeightScheme::Shapley => Ok(shapley_weight(s, n)),
            WeightScheme::Banzhaf => Ok(banzhaf_weight(n)),
            WeightScheme::Table(t @ ExplicitTable::Size { weights, .. }) => {
                self.check_table_width(t, n)?;
                Ok(weights[s])
            }
            WeightScheme::Table(ExplicitTable::Coalition { .. }) => Err(Error::contract(
                "a coalition-keyed table has no size-based weight",
            )),
        }
    }

    /// `w_i(S, N)` for `S ⊆ N∖{i}` with `|N| = s.width()`.
    pub fn weight_of(&self, i: usize, s: Coalition) -> Result<f64> {
        let n = s.width();
        if i >= n || s.contains(i) {
            return Err(Error::contract(format!(
                "player {i} must be outside the coalition and below {n}"
            )));
        }
        match self {
            WeightScheme::Table(t) => {
                self.check_table_width(t, n)?;
                Ok(t.weight_of(s))
            }
            _ => self.weight(s.len(), n),
        }
    }

    /// `max_S w_i(S, N)`.
    pub fn max_weight(&self, i: usize, n: usize) -> Result<f64> {
        if i >= n {
            return Err(Error::contract(format!("player {i} out of range for {n}")));
        }
        match self {
            // s!(n-s-1)!/n! peaks at s = 0 and s = n-1.
            WeightScheme::Shapley => Ok(shapley_weight(0, n)),
            WeightScheme::Banzhaf => Ok(banzhaf_weight(n)),
            WeightScheme::Table(t) => {
                self.check_table_width(t, n)?;
                Ok(match t {
                    ExplicitTable::Size { weights, .. } => {
                        weights.iter().copied().fold(0.0, f64::max)
                    }
                    ExplicitTable::Coalition { weights, .. } => weights
                        .iter()
                        .filter(|(b, _)| *b >> i & 1 == 0)
                        .map(|(_, w)| *w)
                        .fold(0.0, f64::max),
                })
            }
        }
    }

    fn check_table_width(&self, t: &ExplicitTable, n: usize) -> Result<()> {
        if t.n() != n {
            return Err(Error::contract(format!(
                "weight table is for {} players, used with {n}",
                t.n()
            )));
        }
        Ok(())
    }
}

/// Outer (group-level) and inner (within-group) weight families of a coalitional value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalitionalWeightScheme {
    pub outer: WeightScheme,
    pub inner: WeightScheme,
}

impl CoalitionalWeightScheme {
    pub fn owen() -> Self {
        CoalitionalWeightScheme {
            outer: WeightScheme::Shapley,
            inner: WeightScheme::Shapley,
        }
    }

    pub fn banzhaf_owen() -> Self {
        CoalitionalWeightScheme {
            outer: WeightScheme::Banzhaf,
            inner: WeightScheme::Banzhaf,
        }
    }

    /// `w1_j(A, M) · w2_i(T, S_j)`.
    pub fn weight_of(&self, j: usize, a: Coalition, i_local: usize, t: Coalition) -> Result<f64> {
        Ok(self.outer.weight_of(j, a)? * self.inner.weight_of(i_local, t)?)
    }
}
