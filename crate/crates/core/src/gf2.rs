//! Dense bit vectors and elimination over GF(2).

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Lowercase hex, most significant nibble first.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4).max(1);
        (0..nibbles)
            .rev()
            .map(|k| {
                let mut v = 0u8;
                for b in 0..4 {
                    let i = 4 * k + b;
                    if i < self.len && self.get(i) {
                        v |= 1 << b;
                    }
                }
                char::from_digit(v as u32, 16).unwrap()
            })
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// An echelon basis of a span, each basis vector remembering which input
/// vectors it combines.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    pub basis: Vec<BitVector>,
    pub pivots: Vec<usize>,
    pub combos: Vec<BitVector>,
}

impl EchelonBasis {
    /// Eliminate `vectors` (all of one length).
    pub fn new(vectors: &[BitVector]) -> Self {
        let n = vectors.len();
        let mut out = EchelonBasis {
            basis: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
        };
        for (j, v) in vectors.iter().enumerate() {
            let mut v = v.clone();
            let mut combo = BitVector::from_ones(n, [j]);
            out.reduce(&mut v, &mut combo);
            if let Some(p) = v.first_one() {
                out.basis.push(v);
                out.pivots.push(p);
                out.combos.push(combo);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Clear every pivot bit of `v`, tracking the combination used.
    pub fn reduce(&self, v: &mut BitVector, combo: &mut BitVector) {
        for ((b, &p), c) in self.basis.iter().zip(&self.pivots).zip(&self.combos) {
            if v.get(p) {
                v.xor_assign(b);
                combo.xor_assign(c);
            }
        }
    }

    /// Some `x` with `sum x_j vectors[j] = target`, if one exists.
    pub fn solve(&self, target: &BitVector, inputs: usize) -> Option<BitVector> {
        let mut v = target.clone();
        let mut combo = BitVector::zeros(inputs);
        self.reduce(&mut v, &mut combo);
        v.is_zero().then_some(combo)
    }
}

/// Rank of a matrix given by its rows.
pub fn rank(rows: &[BitVector]) -> usize {
    EchelonBasis::new(rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[BitVector::zeros(5), BitVector::zeros(5)]), 0);
        let id: Vec<_> = (0..15).map(|i| BitVector::from_ones(15, [i])).collect();
        assert_eq!(rank(&id), 15);
        let dup = vec![
            BitVector::from_ones(4, [0, 1]),
            BitVector::from_ones(4, [1, 2]),
            BitVector::from_ones(4, [0, 2]),
        ];
        assert_eq!(rank(&dup), 2);
    }

    #[test]
    fn solve_finds_combination() {
        let vs = vec![
            BitVector::from_ones(70, [0, 65]),
            BitVector::from_ones(70, [65, 69]),
            BitVector::from_ones(70, [3]),
        ];
        let e = EchelonBasis::new(&vs);
        let t = BitVector::from_ones(70, [0, 69, 3]);
        let x = e.solve(&t, 3).unwrap();
        let mut acc = BitVector::zeros(70);
        for j in x.ones() {
            acc.xor_assign(&vs[j]);
        }
        assert_eq!(acc, t);
        assert!(e.solve(&BitVector::from_ones(70, [1]), 3).is_none());
    }

    #[test]
    fn hex_is_msb_first() {
        assert_eq!(BitVector::from_ones(8, [0, 7]).to_hex(), "81");
        assert_eq!(BitVector::from_ones(5, [4]).to_hex(), "10");
    }
}
