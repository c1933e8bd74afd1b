//! Types (empirical distributions) of sequences and multinomial counts.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::big_ratio;

/// The type `P_{x^n}` of a sequence, stored as symbol counts in alphabet order.
///
/// Ordering is lexicographic on the count array, which fixes the iteration
/// order of every spectrum map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeVector {
    counts: Vec<u32>,
}

impl TypeVector {
    /// Builds a type from explicit counts. `q = counts.len()` must be at least 1.
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("a type needs an alphabet of size at least 1"));
        }
        Ok(TypeVector { counts })
    }

    /// The type of the all-zero sequence of length `n`.
    pub fn zero(q: u32, n: usize) -> Self {
        let mut counts = vec![0; q as usize];
        counts[0] = n as u32;
        TypeVector { counts }
    }

    /// `P_{x^n}` for a sequence over `{0..q}`.
    pub fn of(q: u32, x: &[u32]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut counts = vec![0u32; q as usize];
        for &a in x {
            let slot = counts
                .get_mut(a as usize)
                .ok_or(Error::ElementOutOfRange { value: a as u64, q })?;
            *slot += 1;
        }
        Ok(TypeVector { counts })
    }

    /// Unchecked counting into a reusable buffer.
    #[inline]
    pub(crate) fn count_into(x: &[u32], counts: &mut [u32]) {
        counts.fill(0);
        for &a in x {
            counts[a as usize] += 1;
        }
    }

    /// All types in `𝒫_n(𝒳)` for `|𝒳| = q`, in ascending order.
    pub fn all(q: u32, n: usize) -> Vec<TypeVector> {
        let mut out = Vec::new();
        let mut counts = vec![0u32; q as usize];
        fn rec(i: usize, left: u32, counts: &mut Vec<u32>, out: &mut Vec<TypeVector>) {
            if i + 1 == counts.len() {
                counts[i] = left;
                out.push(TypeVector { counts: counts.clone() });
                return;
            }
            for c in 0..=left {
                counts[i] = c;
                rec(i + 1, left - c, counts, out);
            }
        }
        rec(0, n as u32, &mut counts, &mut out);
        out.sort();
        out
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.counts.len() as u32
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, a: usize) -> u32 {
        self.counts[a]
    }

    /// `P(a) = counts[a] / n` as an exact rational.
    pub fn prob(&self, a: usize) -> BigRational {
        big_ratio(self.counts[a] as u64, self.n() as u64)
    }

    pub fn prob_f64(&self, a: usize) -> f64 {
        self.counts[a] as f64 / self.n() as f64
    }

    pub fn is_zero_type(&self) -> bool {
        self.counts[1..].iter().all(|&c| c == 0)
    }

    /// Hamming weight of any sequence of this type.
    pub fn weight(&self) -> usize {
        self.n() - self.counts[0] as usize
    }

    /// The same distribution at length `k·n` (counts multiplied by `k`).
    pub fn scaled(&self, k: u32) -> TypeVector {
        TypeVector { counts: self.counts.iter().map(|&c| c * k).collect() }
    }

    /// Whether two types describe the same distribution, possibly at different lengths.
    pub fn same_distribution(&self, other: &TypeVector) -> bool {
        let (n1, n2) = (self.n() as u64, other.n() as u64);
        self.q() == other.q()
            && self.counts.iter().zip(&other.counts).all(|(&a, &b)| a as u64 * n2 == b as u64 * n1)
    }

    /// `n! / ∏_a (nP(a))!`, the number of sequences of this type.
    pub fn multinomial(&self) -> BigUint {
        multinomial(&self.counts)
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Multinomial coefficient `(Σk)! / ∏ k_i!`, computed as a product of binomials.
pub fn multinomial(counts: &[u32]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0u64;
    for &k in counts {
        for j in 1..=k as u64 {
            total += 1;
            acc *= total;
            acc /= j;
        }
    }
    acc
}
