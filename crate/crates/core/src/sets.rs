//! Small fixed-width bit sets for the three-qubit catalogs.
//!
//! Points of W(5,2) (at most 63) fit in one word; lines (at most 315) in five.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Set of point IDs `< 64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut s = PointSet::EMPTY;
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn insert(&mut self, id: usize) {
        debug_assert!(id < 64);
        self.0 |= 1u64 << id;
    }

    pub fn remove(&mut self, id: usize) {
        self.0 &= !(1u64 << id);
    }

    pub fn contains(&self, id: usize) -> bool {
        id < 64 && (self.0 >> id) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: PointSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        BitIter(self.0)
    }

    pub fn first(&self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::from_ids(iter)
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

pub const LINE_WORDS: usize = 5;
pub const MAX_LINES: usize = 64 * LINE_WORDS;

/// Set of line IDs `< 320`; ordered and hashable so it doubles as a
/// canonical form for line-sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct LineSet(pub [u64; LINE_WORDS]);

impl LineSet {
    pub const EMPTY: LineSet = LineSet([0; LINE_WORDS]);

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut s = LineSet::EMPTY;
        for id in ids {
            s.insert(id);
        }
        s
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < MAX_LINES, "line id {id} out of range");
        self.0[id / 64] |= 1u64 << (id % 64);
    }

    pub fn remove(&mut self, id: usize) {
        self.0[id / 64] &= !(1u64 << (id % 64));
    }

    pub fn contains(&self, id: usize) -> bool {
        id < MAX_LINES && (self.0[id / 64] >> (id % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn zip(self, other: LineSet, f: impl Fn(u64, u64) -> u64) -> LineSet {
        let mut out = [0u64; LINE_WORDS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(self.0[i], other.0[i]);
        }
        LineSet(out)
    }

    pub fn union(self, other: LineSet) -> LineSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(self, other: LineSet) -> LineSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(self, other: LineSet) -> LineSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_subset(self, other: LineSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| BitIter(bits).map(move |b| w * 64 + b))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for LineSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        LineSet::from_ids(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_set_ops() {
        let a = LineSet::from_ids([0, 63, 64, 314]);
        let b = LineSet::from_ids([63, 100]);
        assert_eq!(a.len(), 4);
        assert_eq!(a.intersection(b).to_vec(), vec![63]);
        assert_eq!(a.union(b).len(), 5);
        assert_eq!(a.difference(b).to_vec(), vec![0, 64, 314]);
        assert!(LineSet::from_ids([63]).is_subset(a));
    }

    #[test]
    fn point_set_iter_is_sorted() {
        let s = PointSet::from_ids([5, 1, 62]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![1, 5, 62]);
        assert_eq!(s.first(), Some(1));
    }
}
