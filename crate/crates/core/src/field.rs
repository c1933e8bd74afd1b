//! Prime-field arithmetic and dense matrices over `F_q`.
//!
//! Elements are canonical integers `0..q`. Matrices act on column vectors,
//! `x ↦ A·x`, which is how every code in this crate is realized.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted. Keeps every product of two elements inside `u64`.
pub const MAX_MODULUS: u32 = 1 << 16;

/// A prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FieldSpec {
    q: u32,
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u32;
    while p * p <= q {
        if q % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl FieldSpec {
    pub fn new(q: u32) -> Result<Self> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(Error::NotPrime(q as u64));
        }
        Ok(FieldSpec { q })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    /// Checks that `a` is a canonical element.
    pub fn element(self, a: u64) -> Result<u32> {
        if a < self.q as u64 {
            Ok(a as u32)
        } else {
            Err(Error::ElementOutOfRange { value: a, q: self.q })
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.q as u64 - b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.q == 0 {
            return Err(Error::InverseOfZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Adds two vectors coordinate-wise.
    pub fn add_vec(self, x: &[u32], y: &[u32]) -> Result<Vec<u32>> {
        Error::check_dim(x.len(), y.len())?;
        Ok(x.iter().zip(y).map(|(&a, &b)| self.add(a, b)).collect())
    }
}

impl TryFrom<u32> for FieldSpec {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        FieldSpec::new(q)
    }
}

impl From<FieldSpec> for u32 {
    fn from(f: FieldSpec) -> u32 {
        f.q
    }
}

/// A dense `rows × cols` matrix over `F_q`, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged input and out-of-range entries.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            Error::check_dim(cols, row.len())?;
            for &e in row {
                data.push(field.element(e as u64)?);
            }
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    /// Matrix whose `i`-th row is `1` in column `perm[i]`, i.e. `(Πx)_i = x_{perm[i]}`.
    pub fn permutation(field: FieldSpec, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &p) in perm.iter().enumerate() {
            m.data[i * n + p] = 1;
        }
        m
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    /// Sets an entry; the value is reduced mod `q`.
    pub fn set(&mut self, r: usize, c: usize, value: u32) {
        self.data[r * self.cols + c] = value % self.field.q();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// `y = A·x` over `F_q`.
    pub fn mat_vec(&self, x: &[u32]) -> Result<Vec<u32>> {
        Error::check_dim(self.cols, x.len())?;
        let mut y = vec![0; self.rows];
        self.mat_vec_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked variant used by the enumeration hot loops.
    pub(crate) fn mat_vec_into(&self, x: &[u32], y: &mut [u32]) {
        let q = self.field.q() as u64;
        for (r, out) in y.iter_mut().enumerate() {
            let acc: u64 = self.row(r).iter().zip(x).map(|(&a, &b)| a as u64 * b as u64).sum();
            *out = (acc % q) as u32;
        }
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.field != rhs.field {
            return Err(Error::ShapeMismatch(format!(
                "fields F_{} and F_{} differ",
                self.field.q(),
                rhs.field.q()
            )));
        }
        Error::check_dim(self.cols, rhs.rows)?;
        let q = self.field.q() as u64;
        let mut out = FieldMatrix::zeros(self.field, self.rows, rhs.cols);
        let mut acc = vec![0u64; rhs.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (s, &b) in acc.iter_mut().zip(row) {
                    *s = (*s + a * b as u64) % q;
                }
            }
            for (j, s) in acc.iter().enumerate() {
                out.data[i * rhs.cols + j] = *s as u32;
            }
        }
        Ok(out)
    }

    /// Row rank over `F_q` by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for c in 0..cols {
                    a.swap(pivot * cols + c, rank * cols + c);
                }
            }
            let inv = f.inv(a[rank * cols + col]).expect("pivot is nonzero");
            for c in col..cols {
                a[rank * cols + c] = f.mul(a[rank * cols + c], inv);
            }
            for r in (rank + 1)..rows {
                let factor = a[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let v = f.mul(factor, a[rank * cols + c]);
                    a[r * cols + c] = f.sub(a[r * cols + c], v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Number of nonzero entries per row.
    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.row(r).iter().filter(|&&e| e != 0).count()).collect()
    }

    /// Number of nonzero entries per column.
    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.cols).map(|c| (0..self.rows).filter(|&r| self.get(r, c) != 0).count()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    /// Parses the text format: `q m n` on the first line, then `m` rows of `n`
    /// integers in `[0, q)`. Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) =
            lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
        let nums = parse_ints(hline, header)?;
        if nums.len() != 3 {
            return Err(Error::Parse {
                line: hline,
                message: format!("header must be `q m n`, found {} fields", nums.len()),
            });
        }
        let field = FieldSpec::new(u32::try_from(nums[0]).unwrap_or(0))
            .map_err(|e| Error::Parse { line: hline, message: e.to_string() })?;
        let (m, n) = (nums[1] as usize, nums[2] as usize);

        let mut rows = Vec::with_capacity(m);
        for (line, body) in lines.by_ref() {
            if rows.len() == m {
                return Err(Error::Parse { line, message: "more rows than declared".into() });
            }
            let vals = parse_ints(line, body)?;
            if vals.len() != n {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {n} entries, found {}", vals.len()),
                });
            }
            let row = vals
                .into_iter()
                .map(|v| field.element(v))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Parse { line, message: e.to_string() })?;
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::Parse {
                line: text.lines().count() + 1,
                message: format!("expected {m} rows, found {}", rows.len()),
            });
        }
        let mut mat = FieldMatrix::from_rows(field, &rows)?;
        // from_rows infers cols from the first row; m = 0 must still record n.
        mat.cols = n;
        Ok(mat)
    }

    /// Renders the text format accepted by [`FieldMatrix::parse_text`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.field.q(), self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

fn parse_ints(line: usize, body: &str) -> Result<Vec<u64>> {
    body.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse { line, message: format!("`{t}` is not a non-negative integer") })
        })
        .collect()
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for FieldMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FieldMatrix::parse_text(s)
    }
}

impl Serialize for FieldMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            q: u32,
            rows: usize,
            cols: usize,
            entries: &'a [u32],
        }
        Repr { q: self.field.q(), rows: self.rows, cols: self.cols, entries: &self.data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            q: u32,
            rows: usize,
            cols: usize,
            entries: Vec<u32>,
        }
        let r = Repr::deserialize(d)?;
        let field = FieldSpec::new(r.q).map_err(serde::de::Error::custom)?;
        if r.entries.len() != r.rows * r.cols {
            return Err(serde::de::Error::custom("entry count does not match rows × cols"));
        }
        if r.entries.iter().any(|&e| e >= r.q) {
            return Err(serde::de::Error::custom("matrix entry out of range"));
        }
        Ok(FieldMatrix { field, rows: r.rows, cols: r.cols, data: r.entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldSpec {
        FieldSpec::new(q).unwrap()
    }

    #[test]
    fn field_ops_examples() {
        assert_eq!(f(3).mul(2, 2), 1);
        assert_eq!(f(2).add(1, 1), 0);
        assert_eq!(f(5).inv(3).unwrap(), 2);
        assert_eq!(f(7).neg(3), 4);
        assert_eq!(f(7).sub(2, 5), 4);
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert_eq!(f(5).inv(0), Err(Error::InverseOfZero));
    }

    #[test]
    fn composite_and_prime_power_moduli_rejected() {
        for q in [0, 1, 4, 6, 8, 9, 15, 25] {
            assert_eq!(FieldSpec::new(q), Err(Error::NotPrime(q as u64)));
        }
    }

    #[test]
    fn inverses_exhaustive() {
        for q in [2, 3, 5, 7, 11, 13] {
            let field = f(q);
            for a in 1..q {
                // independent check by search
                let b = (1..q).find(|&b| (a * b) % q == 1).unwrap();
                assert_eq!(field.inv(a).unwrap(), b);
                assert_eq!(field.mul(a, field.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn mat_vec_examples() {
        let id = FieldMatrix::identity(f(2), 2);
        assert_eq!(id.mat_vec(&[1, 0]).unwrap(), vec![1, 0]);
        let a = FieldMatrix::from_rows(f(2), &[vec![1, 1]]).unwrap();
        assert_eq!(a.mat_vec(&[1, 1]).unwrap(), vec![0]);
        let b = FieldMatrix::from_rows(f(3), &[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(b.mat_vec(&[1, 1]).unwrap(), vec![0, 0]);
        assert_eq!(b.mat_vec(&[0, 0]).unwrap(), vec![0, 0]);
        assert!(matches!(b.mat_vec(&[1]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(f(2), 3).rank(), 3);
        let a = FieldMatrix::from_rows(f(2), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(a.rank(), 1);
        let b = FieldMatrix::from_rows(f(5), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(b.rank(), 1);
        assert_eq!(FieldMatrix::zeros(f(3), 2, 4).rank(), 0);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let a = FieldMatrix::from_rows(f(3), &[vec![0, 1, 2], vec![2, 2, 0]]).unwrap();
        let text = a.to_text();
        assert_eq!(text, "3 2 3\n0 1 2\n2 2 0\n");
        assert_eq!(FieldMatrix::parse_text(&text).unwrap(), a);

        let bad = FieldMatrix::parse_text("3 2 2\n0 1\n1 3\n").unwrap_err();
        assert!(matches!(bad, Error::Parse { line: 3, .. }), "{bad:?}");
        let short = FieldMatrix::parse_text("2 2 2\n0 1\n").unwrap_err();
        assert!(matches!(short, Error::Parse { .. }));
        let junk = FieldMatrix::parse_text("2 1 2\n0 x\n").unwrap_err();
        assert!(matches!(junk, Error::Parse { line: 2, .. }));
        assert!(FieldMatrix::parse_text("4 1 1\n0\n").is_err());
    }

    #[test]
    fn json_rejects_out_of_range() {
        let ok: FieldMatrix =
            serde_json::from_str(r#"{"q":3,"rows":1,"cols":2,"entries":[1,2]}"#).unwrap();
        assert_eq!(ok.get(0, 1), 2);
        assert!(serde_json::from_str::<FieldMatrix>(r#"{"q":3,"rows":1,"cols":2,"entries":[1,3]}"#)
            .is_err());
    }
}
