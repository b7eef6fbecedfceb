//! Bitmask sets of grid slots.
//!
//! Slots are numbered from 1 externally. Bit `k - 1` of the mask marks slot `k`.

use std::fmt;

use crate::error::{Error, Result};

/// A subset of `{1, ..., 64}`; used both for wedge-basis index tuples and for
/// Borel sets that are unions of slots.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SlotSet(u64);

impl SlotSet {
    pub const EMPTY: SlotSet = SlotSet(0);
    pub const MAX_SLOT: usize = 64;

    /// Builds a set from slot numbers, rejecting slot 0 and slots above 64.
    /// Repeated slots collapse.
    pub fn from_slots<I: IntoIterator<Item = usize>>(slots: I) -> Result<Self> {
        let mut bits = 0u64;
        for k in slots {
            if k == 0 || k > Self::MAX_SLOT {
                return Err(Error::SlotOutOfRange { slot: k, slots: Self::MAX_SLOT });
            }
            bits |= 1 << (k - 1);
        }
        Ok(SlotSet(bits))
    }

    /// # Panics
    /// If `k` is 0 or above 64.
    pub fn singleton(k: usize) -> Self {
        assert!((1..=Self::MAX_SLOT).contains(&k), "slot {k} out of range");
        SlotSet(1 << (k - 1))
    }

    /// `{1, ..., k}`; empty for `k = 0`.
    pub fn prefix(k: usize) -> Self {
        assert!(k <= Self::MAX_SLOT, "slot {k} out of range");
        if k == 64 {
            SlotSet(u64::MAX)
        } else {
            SlotSet((1u64 << k) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        SlotSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        (1..=Self::MAX_SLOT).contains(&k) && self.0 & (1 << (k - 1)) != 0
    }

    pub fn is_subset(self, other: SlotSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: SlotSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: SlotSet) -> SlotSet {
        SlotSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SlotSet) -> SlotSet {
        SlotSet(self.0 & other.0)
    }

    pub fn difference(self, other: SlotSet) -> SlotSet {
        SlotSet(self.0 & !other.0)
    }

    pub fn insert(&mut self, k: usize) {
        *self = self.union(SlotSet::singleton(k));
    }

    /// Largest slot, or 0 for the empty set.
    pub fn max_slot(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Number of members strictly below slot `k`.
    pub fn count_below(self, k: usize) -> usize {
        (self.0 & SlotSet::prefix(k.saturating_sub(1)).0).count_ones() as usize
    }

    /// Zero-based position of `k` in the increasing enumeration.
    pub fn position(self, k: usize) -> Option<usize> {
        self.contains(k).then(|| self.count_below(k))
    }

    /// Members in increasing order.
    pub fn iter(self) -> SlotIter {
        SlotIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct SlotIter(u64);

impl Iterator for SlotIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let k = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(k + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SlotIter {}

impl IntoIterator for SlotSet {
    type Item = usize;
    type IntoIter = SlotIter;

    fn into_iter(self) -> SlotIter {
        self.iter()
    }
}

impl fmt::Debug for SlotSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Sign of the permutation that sorts the concatenation `(a..., b...)` of two
/// disjoint increasing tuples: `(-1)` to the number of pairs with `x ∈ a`,
/// `y ∈ b`, `x > y`.
pub fn merge_sign(a: SlotSet, b: SlotSet) -> f64 {
    debug_assert!(a.is_disjoint(b));
    let inversions: u32 = b.iter().map(|y| (a.0 >> y).count_ones()).sum();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All subsets of `universe` with exactly `n` members, in increasing mask order.
pub fn subsets_of_size(universe: SlotSet, n: usize) -> Vec<SlotSet> {
    let members = universe.to_vec();
    let mut out = Vec::new();
    if n > members.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        out.push(SlotSet(idx.iter().fold(0, |acc, &i| acc | 1 << (members[i] - 1))));
        let mut i = n;
        while i > 0 && idx[i - 1] == members.len() - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_is_increasing() {
        let s = SlotSet::from_slots([5, 1, 3]).unwrap();
        assert_eq!(s.to_vec(), vec![1, 3, 5]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.max_slot(), 5);
        assert_eq!(s.position(3), Some(1));
        assert_eq!(s.position(2), None);
    }

    #[test]
    fn rejects_slot_zero() {
        assert!(SlotSet::from_slots([0]).is_err());
        assert!(SlotSet::from_slots([65]).is_err());
    }

    #[test]
    fn merge_sign_counts_inversions() {
        let s = |v: &[usize]| SlotSet::from_slots(v.iter().copied()).unwrap();
        assert_eq!(merge_sign(s(&[1]), s(&[2])), 1.0);
        assert_eq!(merge_sign(s(&[2]), s(&[1])), -1.0);
        // (3, 4, 1, 2) needs four transpositions
        assert_eq!(merge_sign(s(&[3, 4]), s(&[1, 2])), 1.0);
        // (2, 3, 1)
        assert_eq!(merge_sign(s(&[2, 3]), s(&[1])), 1.0);
        assert_eq!(merge_sign(s(&[2]), s(&[1, 3])), -1.0);
    }

    #[test]
    fn subsets_are_binomial() {
        let u = SlotSet::prefix(6);
        assert_eq!(subsets_of_size(u, 0), vec![SlotSet::EMPTY]);
        assert_eq!(subsets_of_size(u, 3).len(), 20);
        assert!(subsets_of_size(u, 7).is_empty());
        assert!(subsets_of_size(u, 2).iter().all(|s| s.len() == 2));
    }

    #[test]
    fn prefix_edges() {
        assert_eq!(SlotSet::prefix(0), SlotSet::EMPTY);
        assert_eq!(SlotSet::prefix(64).len(), 64);
        assert_eq!(SlotSet::prefix(3).count_below(3), 2);
    }
}
