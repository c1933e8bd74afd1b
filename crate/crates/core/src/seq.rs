//! Enumeration of `𝒳^n` and maps between sequence spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumeration guards. Exceeding any of them is an error, never a silent
/// switch to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumLimits {
    /// Maximum domain size `q^n` for exhaustive evaluation of a map.
    pub max_domain: u128,
    /// Maximum number of permutations `n!` to average over.
    pub max_permutations: u128,
    /// Maximum number of ensemble realizations for exact expectations.
    pub max_realizations: u128,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_domain: 1 << 20, max_permutations: 40_320, max_realizations: 1 << 20 }
    }
}

impl EnumLimits {
    pub fn check_domain(&self, q: u32, n: usize) -> Result<u64> {
        let size = checked_pow(q as u128, n);
        guard("sequence enumeration", size, self.max_domain)?;
        Ok(size.unwrap() as u64)
    }

    pub fn check_permutations(&self, n: usize) -> Result<()> {
        let size = (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k));
        guard("permutation enumeration", size, self.max_permutations)
    }

    pub fn check_realizations(&self, size: Option<u128>) -> Result<()> {
        guard("ensemble enumeration", size, self.max_realizations)
    }
}

fn guard(what: &'static str, size: Option<u128>, limit: u128) -> Result<()> {
    match size {
        Some(s) if s <= limit => Ok(()),
        other => Err(Error::EnumerationLimit { what, size: other.unwrap_or(u128::MAX), limit }),
    }
}

pub(crate) fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

/// Calls `f` on every sequence in `{0..q}^n`.
///
/// Order is little-endian: `x_0` is the fastest-moving digit, so the first
/// nonzero sequence visited is `10…0`.
pub fn for_each_sequence(q: u32, n: usize, mut f: impl FnMut(&[u32])) {
    let mut x = vec![0u32; n];
    loop {
        f(&x);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Index of a sequence in the little-endian order of [`for_each_sequence`].
pub fn sequence_index(q: u32, x: &[u32]) -> u64 {
    x.iter().rev().fold(0u64, |acc, &a| acc * q as u64 + a as u64)
}

/// Inverse of [`sequence_index`].
pub fn sequence_from_index(q: u32, n: usize, mut index: u64) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let a = (index % q as u64) as u32;
            index /= q as u64;
            a
        })
        .collect()
}

/// A deterministic map `𝒳^n → 𝒴^m` that can be evaluated pointwise.
pub trait SeqMap {
    fn input_alphabet(&self) -> u32;
    fn input_len(&self) -> usize;
    fn output_alphabet(&self) -> u32;
    fn output_len(&self) -> usize;
    /// Writes `f(x)` into `out`; `x.len() == input_len()` and
    /// `out.len() == output_len()` are guaranteed by callers.
    fn apply_into(&self, x: &[u32], out: &mut [u32]);

    fn apply(&self, x: &[u32]) -> Result<Vec<u32>> {
        Error::check_dim(self.input_len(), x.len())?;
        if let Some(&a) = x.iter().find(|&&a| a >= self.input_alphabet()) {
            return Err(Error::ElementOutOfRange { value: a as u64, q: self.input_alphabet() });
        }
        let mut out = vec![0; self.output_len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }
}

/// A map given by an explicit lookup table indexed by [`sequence_index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    qx: u32,
    n: usize,
    qy: u32,
    m: usize,
    table: Vec<Vec<u32>>,
}

impl TableMap {
    /// Tabulates `f` over the whole domain.
    pub fn from_fn(
        qx: u32,
        n: usize,
        qy: u32,
        m: usize,
        limits: &EnumLimits,
        mut f: impl FnMut(&[u32]) -> Vec<u32>,
    ) -> Result<Self> {
        limits.check_domain(qx, n)?;
        let mut table = Vec::new();
        let mut err = None;
        for_each_sequence(qx, n, |x| {
            let y = f(x);
            if y.len() != m || y.iter().any(|&b| b >= qy) {
                err.get_or_insert(Error::ShapeMismatch(format!("table entry {y:?} not in {qy}^{m}")));
            }
            table.push(y);
        });
        match err {
            Some(e) => Err(e),
            None => Ok(TableMap { qx, n, qy, m, table }),
        }
    }

    /// Builds a table from an explicit relation listed in domain order.
    pub fn from_table(qx: u32, n: usize, qy: u32, m: usize, table: Vec<Vec<u32>>) -> Result<Self> {
        let expected = checked_pow(qx as u128, n).unwrap_or(u128::MAX);
        if table.len() as u128 != expected {
            return Err(Error::ShapeMismatch(format!(
                "table has {} rows, domain has {expected}",
                table.len()
            )));
        }
        if table.iter().any(|y| y.len() != m || y.iter().any(|&b| b >= qy)) {
            return Err(Error::ShapeMismatch(format!("table entries must lie in {qy}^{m}")));
        }
        Ok(TableMap { qx, n, qy, m, table })
    }
}

impl SeqMap for TableMap {
    fn input_alphabet(&self) -> u32 {
        self.qx
    }
    fn input_len(&self) -> usize {
        self.n
    }
    fn output_alphabet(&self) -> u32 {
        self.qy
    }
    fn output_len(&self) -> usize {
        self.m
    }
    fn apply_into(&self, x: &[u32], out: &mut [u32]) {
        out.copy_from_slice(&self.table[sequence_index(self.qx, x) as usize]);
    }
}
