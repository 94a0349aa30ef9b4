//! Exponent vectors over a fixed frame, used for symmetric-algebra words,
//! chart monomials, and normal-ordered differential-operator symbols.

use crate::scalar::{binomial, factorial, Ratio};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    /// e_k: a single 1 in slot k.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = vec![0; len];
        v[k] = 1;
        MultiIndex(v)
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> u32 {
        self.0[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    /// |I| = sum of exponents.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// I! = product of slotwise factorials.
    pub fn factorial(&self) -> Ratio {
        self.0
            .iter()
            .map(|&e| factorial(e as u64))
            .fold(Ratio::one(), |a, b| a * b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn plus_unit(&self, k: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[k] += 1;
        MultiIndex(v)
    }

    /// Componentwise subtraction; None when any slot would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        let mut v = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            v.push(a - b);
        }
        Some(MultiIndex(v))
    }

    pub fn minus_unit(&self, k: usize) -> Option<MultiIndex> {
        if self.0[k] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[k] -= 1;
        Some(MultiIndex(v))
    }

    /// Componentwise <=.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Product of componentwise binomial coefficients C(self_k, other_k).
    pub fn binomial(&self, lower: &MultiIndex) -> Ratio {
        self.0
            .iter()
            .zip(&lower.0)
            .map(|(&n, &k)| binomial(n as u64, k as u64))
            .fold(Ratio::one(), |a, b| a * b)
    }

    /// All J with J <= self componentwise, in lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.len())];
        for (slot, &e) in self.0.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for base in &out {
                for v in 0..=e {
                    let mut w = base.0.clone();
                    w[slot] = v;
                    next.push(MultiIndex(w));
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of the given length with total degree exactly `d`.
    pub fn of_degree(len: usize, d: u32) -> Vec<MultiIndex> {
        if len == 0 {
            return if d == 0 {
                vec![MultiIndex::zero(0)]
            } else {
                vec![]
            };
        }
        let mut out = Vec::new();
        for first in 0..=d {
            for rest in MultiIndex::of_degree(len - 1, d - first) {
                let mut v = Vec::with_capacity(len);
                v.push(first);
                v.extend(rest.0);
                out.push(MultiIndex(v));
            }
        }
        out
    }

    /// All multi-indices of the given length with total degree <= `d`.
    pub fn up_to_degree(len: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| MultiIndex::of_degree(len, k)).collect()
    }

    /// Expands the exponent vector to an explicit letter sequence,
    /// e.g. (2,0,1) -> [0,0,2].
    pub fn letters(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (i, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                out.push(i);
            }
        }
        out
    }

    pub fn from_letters(len: usize, letters: &[usize]) -> Self {
        let mut v = vec![0u32; len];
        for &l in letters {
            v[l] += 1;
        }
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn arithmetic() {
        let a = MultiIndex::from_vec(vec![2, 0, 1]);
        let b = MultiIndex::from_vec(vec![1, 0, 1]);
        assert_eq!(a.total(), 3);
        assert_eq!(a.add(&b), MultiIndex::from_vec(vec![3, 0, 2]));
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::from_vec(vec![1, 0, 0])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.factorial(), int(2));
        assert_eq!(a.binomial(&b), int(2));
        assert!(b.leq(&a));
    }

    #[test]
    fn enumeration() {
        assert_eq!(MultiIndex::of_degree(2, 2).len(), 3);
        assert_eq!(MultiIndex::up_to_degree(2, 2).len(), 6);
        let k = MultiIndex::from_vec(vec![1, 2]);
        assert_eq!(k.sub_indices().len(), 6);
        assert_eq!(k.letters(), vec![0, 1, 1]);
        assert_eq!(MultiIndex::from_letters(2, &[0, 1, 1]), k);
    }
}
