//! Coalitions of players and partitions of the feature set.
//!
//! A [`Coalition`] is a subset of `{0, …, n-1}` stored as a single `u64`
//! bitmask, so the player count is capped at [`MAX_PLAYERS`].

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported number of players.
pub const MAX_PLAYERS: usize = 64;

/// A subset of the players `{0, …, n-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coalition {
    bits: u64,
    n: u8,
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Coalition {
    pub fn empty(n: usize) -> Result<Self> {
        check_width(n)?;
        Ok(Coalition {
            bits: 0,
            n: n as u8,
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        check_width(n)?;
        Ok(Coalition {
            bits: full_mask(n),
            n: n as u8,
        })
    }

    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        check_width(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::contract(format!(
                "bitmask {bits:#x} has players outside 0..{n}"
            )));
        }
        Ok(Coalition { bits, n: n as u8 })
    }

    /// Caller guarantees `n <= 64` and no bit at or above `n`.
    #[inline]
    pub(crate) fn from_bits_unchecked(bits: u64, n: usize) -> Self {
        debug_assert!(n <= MAX_PLAYERS && bits & !full_mask(n) == 0);
        Coalition { bits, n: n as u8 }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, n: usize) -> Result<Self> {
        let mut c = Coalition::empty(n)?;
        for i in indices {
            c = c.with(i)?;
        }
        Ok(c)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Ground-set size.
    #[inline]
    pub fn width(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.width() && self.bits >> i & 1 == 1
    }

    /// Returns the coalition with player `i` added.
    pub fn with(self, i: usize) -> Result<Self> {
        if i >= self.width() {
            return Err(Error::contract(format!(
                "player {i} out of range for {} players",
                self.n
            )));
        }
        Ok(Coalition {
            bits: self.bits | 1 << i,
            n: self.n,
        })
    }

    pub fn without(self, i: usize) -> Self {
        if i >= self.width() {
            return self;
        }
        Coalition {
            bits: self.bits & !(1 << i),
            n: self.n,
        }
    }

    pub fn union(self, other: Coalition) -> Result<Self> {
        self.same_width(&other)?;
        Ok(Coalition {
            bits: self.bits | other.bits,
            n: self.n,
        })
    }

    pub fn intersection(self, other: Coalition) -> Result<Self> {
        self.same_width(&other)?;
        Ok(Coalition {
            bits: self.bits & other.bits,
            n: self.n,
        })
    }

    /// Complement within `{0, …, n-1}`.
    pub fn complement(self) -> Self {
        Coalition {
            bits: !self.bits & full_mask(self.width()),
            n: self.n,
        }
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Members {
        Members { bits: self.bits }
    }

    fn same_width(&self, other: &Coalition) -> Result<()> {
        if self.n != other.n {
            return Err(Error::contract(format!(
                "coalition widths differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_PLAYERS {
        return Err(Error::contract(format!(
            "{n} players exceeds the supported maximum of {MAX_PLAYERS}"
        )));
    }
    Ok(())
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

/// Iterator over the members of a coalition.
#[derive(Clone)]
pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let i = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.bits.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Members {}

/// A partition `{S_1, …, S_m}` of the features `{0, …, n-1}` into nonempty,
/// pairwise disjoint groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    groups: Vec<Coalition>,
    /// `group_of[i]` is the index of the group holding feature `i`.
    group_of: Vec<usize>,
    /// Position of each feature inside its group's sorted member list.
    local_index: Vec<usize>,
    members: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    /// Builds a partition from 0-based index lists.
    pub fn new(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        check_width(n)?;
        if groups.is_empty() {
            return Err(Error::contract("a partition needs at least one group"));
        }
        let mut seen = Coalition::empty(n)?;
        let mut built = Vec::with_capacity(groups.len());
        for (j, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::contract(format!("group {} is empty", j + 1)));
            }
            let mut c = Coalition::empty(n)?;
            for &i in g {
                if i >= n {
                    return Err(Error::contract(format!(
                        "feature index {} out of range for {n} features",
                        i + 1
                    )));
                }
                if seen.contains(i) {
                    return Err(Error::contract(format!(
                        "feature {} appears in more than one group",
                        i + 1
                    )));
                }
                seen = seen.with(i)?;
                c = c.with(i)?;
            }
            built.push(c);
        }
        if seen != Coalition::full(n)? {
            let missing: Vec<usize> = seen.complement().iter().map(|i| i + 1).collect();
            return Err(Error::contract(format!(
                "partition does not cover features {missing:?}"
            )));
        }
        Ok(Self::from_groups(built, n))
    }

    /// Builds a partition from 1-based index lists, the notation used in config files.
    pub fn from_one_based(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let zero: Vec<Vec<usize>> = groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&i| {
                        i.checked_sub(1)
                            .ok_or_else(|| Error::contract("feature indices are 1-based"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::new(n, &zero)
    }

    /// Parses a JSON list of 1-based index lists, e.g. `[[1,2],[3]]`.
    pub fn from_json(n: usize, text: &str) -> Result<Self> {
        let groups: Vec<Vec<usize>> = serde_json::from_str(text)?;
        Self::from_one_based(n, &groups)
    }

    pub fn singletons(n: usize) -> Result<Self> {
        let groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        Self::new(n, &groups)
    }

    pub fn single_group(n: usize) -> Result<Self> {
        Self::new(n, &[(0..n).collect()])
    }

    fn from_groups(groups: Vec<Coalition>, n: usize) -> Self {
        let mut group_of = vec![0; n];
        let mut local_index = vec![0; n];
        for (j, g) in groups.iter().enumerate() {
            for (t, i) in g.iter().enumerate() {
                group_of[i] = j;
                local_index[i] = t;
            }
        }
        let members = groups.iter().map(|g| g.iter().collect()).collect();
        Partition {
            groups,
            group_of,
            local_index,
            members,
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Coalition] {
        &self.groups
    }

    pub fn group(&self, j: usize) -> Coalition {
        self.groups[j]
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// Position of feature `i` among the sorted members of its group.
    pub fn local_index(&self, i: usize) -> usize {
        self.local_index[i]
    }

    /// `Q_A`: the union of the groups selected by `a`, a coalition over the `m` groups.
    pub fn union_of_groups(&self, a: Coalition) -> Result<Coalition> {
        if a.width() != self.m() {
            return Err(Error::contract(format!(
                "group coalition has width {} but the partition has {} groups",
                a.width(),
                self.m()
            )));
        }
        Ok(self.union_of_groups_bits(a.bits()))
    }

    #[inline]
    pub(crate) fn union_of_groups_bits(&self, mut a: u64) -> Coalition {
        let mut bits = 0;
        while a != 0 {
            let j = a.trailing_zeros() as usize;
            bits |= self.groups[j].bits();
            a &= a - 1;
        }
        Coalition::from_bits_unchecked(bits, self.n)
    }

    /// Sorted members of group `j`.
    pub fn members(&self, j: usize) -> &[usize] {
        &self.members[j]
    }

    /// Maps a coalition over the local positions of group `j` to a coalition over features.
    #[inline]
    pub(crate) fn lift_local(&self, j: usize, mut local: u64) -> u64 {
        let members = &self.members[j];
        let mut out = 0;
        while local != 0 {
            out |= 1 << members[local.trailing_zeros() as usize];
            local &= local - 1;
        }
        out
    }

    /// 1-based index lists, the config-file notation.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|i| i + 1).collect())
            .collect()
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn union_of_groups_examples() {
        let p = Partition::new(3, &[vec![0, 1], vec![2]]).unwrap();
        let none = Coalition::empty(2).unwrap();
        assert!(p.union_of_groups(none).unwrap().is_empty());
        let all = Coalition::full(2).unwrap();
        assert_eq!(p.union_of_groups(all).unwrap(), Coalition::full(3).unwrap());

        let p = Partition::new(6, &[vec![0, 1], vec![2], vec![3, 4, 5]]).unwrap();
        let a = Coalition::from_indices([2], 3).unwrap();
        assert_eq!(
            p.union_of_groups(a).unwrap(),
            Coalition::from_indices([3, 4, 5], 6).unwrap()
        );
    }

    #[test]
    fn union_of_groups_width_mismatch() {
        let p = Partition::new(3, &[vec![0, 1], vec![2]]).unwrap();
        let a = Coalition::empty(3).unwrap();
        assert!(matches!(p.union_of_groups(a), Err(Error::Contract(_))));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, &[vec![0, 1]]).is_err());
        assert!(Partition::new(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, &[vec![0, 1, 2], vec![]]).is_err());
        assert!(Partition::new(3, &[vec![0, 1, 3]]).is_err());
        assert!(Partition::new(3, &[]).is_err());
        assert!(Partition::from_one_based(2, &[vec![0, 1]]).is_err());
        let p = Partition::from_json(4, "[[1,2],[3],[4]]").unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.group_of(1), 0);
        assert_eq!(p.local_index(1), 1);
        assert_eq!(p.to_one_based(), vec![vec![1, 2], vec![3], vec![4]]);
    }

    #[test]
    fn width_limit() {
        assert!(Coalition::empty(64).is_ok());
        assert!(Coalition::empty(65).is_err());
        assert_eq!(Coalition::full(64).unwrap().len(), 64);
        assert!(Coalition::from_bits(0b1000, 3).is_err());
    }

    #[test]
    fn lift_local_maps_positions() {
        let p = Partition::new(6, &[vec![0, 3], vec![1, 2, 5], vec![4]]).unwrap();
        assert_eq!(p.lift_local(1, 0b101), (1 << 1) | (1 << 5));
        assert_eq!(p.lift_local(1, 0b010), 1 << 2);
        assert_eq!(p.lift_local(0, 0b11), (1 << 0) | (1 << 3));
        assert_eq!(p.lift_local(2, 0), 0);
    }

    fn to_set(c: Coalition) -> BTreeSet<usize> {
        c.iter().collect()
    }

    // Exhaustive comparison with an explicit-set reference for n <= 10.
    #[test]
    fn set_ops_match_reference() {
        for n in 0..=10usize {
            let universe: BTreeSet<usize> = (0..n).collect();
            let total = 1u64 << n;
            let step = if n > 7 { 37 } else { 1 };
            let mut a = 0;
            while a < total {
                let ca = Coalition::from_bits(a, n).unwrap();
                let sa = to_set(ca);
                assert_eq!(ca.len(), sa.len());
                let comp: BTreeSet<usize> = universe.difference(&sa).copied().collect();
                assert_eq!(to_set(ca.complement()), comp);
                for i in 0..n {
                    let mut ins = sa.clone();
                    ins.insert(i);
                    assert_eq!(to_set(ca.with(i).unwrap()), ins);
                    assert_eq!(ca.contains(i), sa.contains(&i));
                }
                let mut b = 0;
                while b < total {
                    let cb = Coalition::from_bits(b, n).unwrap();
                    let sb = to_set(cb);
                    let u: BTreeSet<usize> = sa.union(&sb).copied().collect();
                    assert_eq!(to_set(ca.union(cb).unwrap()), u);
                    assert_eq!(ca.is_subset_of(&cb), sa.is_subset(&sb));
                    b += step;
                }
                a += step;
            }
        }
    }
}
