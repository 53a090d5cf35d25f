//! Coalition samplers: draws `S ⊆ N∖{i}` with probability `w_i(S, N)`.

use rand::Rng;

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::weights::{ExplicitTable, WeightScheme, TABLE_LIMIT};

/// Predecessors of `i` in a uniformly random permutation of `{0, …, n-1}`.
///
/// Draws the whole permutation with Fisher–Yates. The set has law
/// `P(S) = |S|! (n - |S| - 1)! / n!`, the Shapley weights.
#[inline]
pub fn permutation_predecessors<R: Rng + ?Sized>(i: usize, n: usize, rng: &mut R) -> u64 {
    fisher_yates_predecessors(i, n, |k| rng.gen_range(0..=k))
}

/// Fisher–Yates with the swap partners supplied by `choose`.
///
/// For `k = n-1, …, 1`, `choose(k)` must return a value in `0..=k`; uniform
/// choices give a uniform permutation. Returns the players placed before `i`.
#[inline]
pub fn fisher_yates_predecessors<F: FnMut(u32) -> u32>(i: usize, n: usize, mut choose: F) -> u64 {
    let mut perm = [0u8; MAX_PLAYERS];
    for (k, p) in perm.iter_mut().enumerate().take(n) {
        *p = k as u8;
    }
    for k in (1..n).rev() {
        let j = choose(k as u32) as usize;
        perm.swap(k, j);
    }
    let mut bits = 0u64;
    for &p in &perm[..n] {
        if p as usize == i {
            break;
        }
        bits |= 1 << p;
    }
    bits
}

pub fn sample_coalition_permutation<R: Rng + ?Sized>(
    i: usize,
    n: usize,
    rng: &mut R,
) -> Result<Coalition> {
    check_player(i, n)?;
    Ok(Coalition::from_bits_unchecked(
        permutation_predecessors(i, n, rng),
        n,
    ))
}

/// Every player other than `i` joins independently with probability 1/2.
#[inline]
pub fn bernoulli_subset<R: Rng + ?Sized>(i: usize, n: usize, rng: &mut R) -> u64 {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    rng.next_u64() & mask & !(1u64 << i)
}

pub fn sample_coalition_bernoulli<R: Rng + ?Sized>(
    i: usize,
    n: usize,
    rng: &mut R,
) -> Result<Coalition> {
    check_player(i, n)?;
    Ok(Coalition::from_bits_unchecked(
        bernoulli_subset(i, n, rng),
        n,
    ))
}

fn check_player(i: usize, n: usize) -> Result<()> {
    if i >= n || n > MAX_PLAYERS {
        return Err(Error::contract(format!(
            "player {i} invalid for {n} players"
        )));
    }
    Ok(())
}

/// Inverse-CDF sampler over the enumerated subsets of `N∖{i}`.
#[derive(Clone, Debug)]
pub struct TableSampler {
    subsets: Vec<u64>,
    cdf: Vec<f64>,
    n: usize,
}

impl TableSampler {
    pub fn new(scheme: &WeightScheme, i: usize, n: usize) -> Result<Self> {
        check_player(i, n)?;
        if n > TABLE_LIMIT {
            return Err(Error::Limit(format!(
                "table sampling enumerates 2^{} subsets; limit is {TABLE_LIMIT} players",
                n - 1
            )));
        }
        let bit = 1u64 << i;
        let mut subsets = Vec::new();
        let mut cdf = Vec::new();
        let mut acc = 0.0;
        for s in (0..1u64 << n).filter(|s| s & bit == 0) {
            let w = scheme.weight_of(i, Coalition::from_bits_unchecked(s, n))?;
            if w > 0.0 {
                acc += w;
                subsets.push(s);
                cdf.push(acc);
            }
        }
        if subsets.is_empty() {
            return Err(Error::contract("weight table has no positive weight"));
        }
        Ok(TableSampler { subsets, cdf, n })
    }

    #[inline]
    pub fn sample_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cdf.last().unwrap_or(&1.0);
        let u = rng.gen::<f64>() * total;
        let k = self.cdf.partition_point(|&c| c <= u);
        self.subsets[k.min(self.subsets.len() - 1)]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Coalition {
        Coalition::from_bits_unchecked(self.sample_bits(rng), self.n)
    }
}

/// Draws `S ⊆ N∖{i}` from the weight family of a scheme.
#[derive(Clone, Debug)]
pub enum CoalitionSampler {
    Permutation { i: usize, n: usize },
    Bernoulli { i: usize, n: usize },
    Table(TableSampler),
}

impl CoalitionSampler {
    pub fn for_scheme(scheme: &WeightScheme, i: usize, n: usize) -> Result<Self> {
        check_player(i, n)?;
        Ok(match scheme {
            WeightScheme::Shapley => CoalitionSampler::Permutation { i, n },
            WeightScheme::Banzhaf => CoalitionSampler::Bernoulli { i, n },
            WeightScheme::Table(t) => {
                if t.n() != n {
                    return Err(Error::contract(format!(
                        "weight table is for {} players, used with {n}",
                        t.n()
                    )));
                }
                CoalitionSampler::Table(TableSampler::new(scheme, i, n)?)
            }
        })
    }

    #[inline]
    pub fn sample_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            CoalitionSampler::Permutation { i, n } => permutation_predecessors(*i, *n, rng),
            CoalitionSampler::Bernoulli { i, n } => bernoulli_subset(*i, *n, rng),
            CoalitionSampler::Table(t) => t.sample_bits(rng),
        }
    }
}

/// Convenience for explicit tables.
pub fn sample_coalition_table<R: Rng + ?Sized>(
    table: &ExplicitTable,
    i: usize,
    n: usize,
    rng: &mut R,
) -> Result<Coalition> {
    let scheme = WeightScheme::table(table.clone())?;
    Ok(TableSampler::new(&scheme, i, n)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::rng::{stream_rng, StreamId, StreamKind};
    use crate::weights::shapley_weight;

    fn rng() -> rand_chacha::ChaCha8Rng {
        stream_rng(11, StreamId::new(StreamKind::Sampler, 0, 0))
    }

    #[test]
    fn single_player() {
        let mut r = rng();
        for _ in 0..100 {
            assert!(sample_coalition_permutation(0, 1, &mut r)
                .unwrap()
                .is_empty());
            assert!(sample_coalition_bernoulli(0, 1, &mut r).unwrap().is_empty());
        }
        assert!(sample_coalition_permutation(1, 1, &mut r).is_err());
    }

    #[test]
    fn never_contains_the_player() {
        let mut r = rng();
        for n in 1..=12 {
            for i in 0..n {
                let s = sample_coalition_permutation(i, n, &mut r).unwrap();
                assert!(!s.contains(i));
                let s = sample_coalition_bernoulli(i, n, &mut r).unwrap();
                assert!(!s.contains(i));
            }
        }
    }

    #[test]
    fn two_players_split_evenly() {
        let mut r = rng();
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| {
                !sample_coalition_permutation(0, 2, &mut r)
                    .unwrap()
                    .is_empty()
            })
            .count();
        // 4 sd of Binomial(1e5, 1/2) is about 632.
        assert!((hits as i64 - draws / 2).abs() < 632, "{hits}");
    }

    #[test]
    fn point_mass_table() {
        let t = ExplicitTable::Coalition {
            n: 4,
            weights: [(0u64, 1.0)].into_iter().collect(),
        };
        let mut r = rng();
        for _ in 0..100 {
            assert!(sample_coalition_table(&t, 1, 4, &mut r).unwrap().is_empty());
        }
    }

    #[test]
    fn table_of_shapley_weights_chi_square() {
        let n = 3;
        let t = ExplicitTable::Size {
            n,
            weights: (0..n).map(|s| shapley_weight(s, n)).collect(),
        };
        let scheme = WeightScheme::table(t).unwrap();
        let sampler = TableSampler::new(&scheme, 0, n).unwrap();
        let mut r = rng();
        let draws = 100_000usize;
        let mut counts = [0usize; 8];
        for _ in 0..draws {
            counts[sampler.sample_bits(&mut r) as usize] += 1;
        }
        let mut chi2 = 0.0;
        for s in (0..8u64).filter(|s| s & 1 == 0) {
            let expected = draws as f64 * shapley_weight(s.count_ones() as usize, n);
            let d = counts[s as usize] as f64 - expected;
            chi2 += d * d / expected;
        }
        // Critical value of chi-square with 3 degrees of freedom at alpha = 0.001.
        assert!(chi2 < 16.266, "chi2 = {chi2}");
    }

    #[test]
    fn banzhaf_table_matches_bernoulli_law() {
        let n = 4;
        let t = ExplicitTable::Size {
            n,
            weights: vec![0.125; n],
        };
        let scheme = WeightScheme::table(t).unwrap();
        let sampler = TableSampler::new(&scheme, 2, n).unwrap();
        assert_eq!(sampler.subsets.len(), 8);
        for w in sampler.cdf.windows(2) {
            assert!((w[1] - w[0] - 0.125).abs() < 1e-15);
        }
    }
}
