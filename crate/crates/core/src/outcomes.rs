use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest sample space an [`OutcomeSet`] can index.
pub const MAX_OUTCOMES: usize = 64;

/// A subset of `{0, .., n-1}` stored as a bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeSet(u64);

impl OutcomeSet {
    pub const EMPTY: OutcomeSet = OutcomeSet(0);

    pub fn from_bits(bits: u64) -> Self {
        OutcomeSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_OUTCOMES, "sample space larger than {MAX_OUTCOMES}");
        if n == MAX_OUTCOMES {
            OutcomeSet(u64::MAX)
        } else {
            OutcomeSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_OUTCOMES);
        OutcomeSet(1u64 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        indices
            .into_iter()
            .fold(OutcomeSet::EMPTY, |acc, i| acc.with(i))
    }

    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_OUTCOMES);
        OutcomeSet(self.0 | (1u64 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_OUTCOMES && self.0 & (1u64 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        OutcomeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        OutcomeSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        OutcomeSet(self.0 & !other.0)
    }

    /// Complement relative to `{0, .., n-1}`.
    pub fn complement(self, n: usize) -> Self {
        OutcomeSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_OUTCOMES).filter(move |i| bits & (1u64 << i) != 0)
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

/// Iterator over the subsets of a bitmask (Gosper-free submask walk).
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = OutcomeSet;

    fn next(&mut self) -> Option<OutcomeSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(OutcomeSet(cur))
    }
}

impl fmt::Debug for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "w{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_walk_is_exhaustive() {
        let s = OutcomeSet::from_indices([0, 2, 5]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|b| b.is_subset(s)));
        assert_eq!(OutcomeSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn set_algebra() {
        let a = OutcomeSet::from_indices([0, 1]);
        let b = OutcomeSet::from_indices([1, 2]);
        assert_eq!(a.union(b), OutcomeSet::full(3));
        assert_eq!(a.intersection(b), OutcomeSet::singleton(1));
        assert_eq!(a.complement(3), OutcomeSet::singleton(2));
        assert_eq!(a.to_string(), "{w1,w2}");
        assert_eq!(OutcomeSet::full(64).len(), 64);
    }
}
