//! Probability that a uniform random `m × n` matrix over `F_q` has full row rank.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::numeric::{big_int, big_ratio, rpow};

fn check(q: u32, n: usize, m: usize) -> Result<()> {
    FieldSpec::new(q)?;
    if m > n {
        return Err(Error::invalid(format!("full row rank needs m <= n, got m={m}, n={n}")));
    }
    Ok(())
}

/// `∏_{i=1}^m (1 − q^{i−1}/q^n)`. Equals 1 for `m = 0`.
pub fn rank_full_probability(q: u32, n: usize, m: usize) -> Result<BigRational> {
    check(q, n, m)?;
    let qr = big_int(q);
    let one = BigRational::one();
    Ok((1..=m).map(|i| &one - rpow(&qr, i as i64 - 1 - n as i64)).product())
}

/// `(1 − q^{m−n−k}/(q−1)) ∏_{i=1}^k (1 − q^{m−n−i})` for `1 ≤ k ≤ m`, a strict
/// lower bound on [`rank_full_probability`].
pub fn rank_lower_bound(q: u32, n: usize, m: usize, k: usize) -> Result<BigRational> {
    check(q, n, m)?;
    if k == 0 || k > m {
        return Err(Error::invalid(format!("k must satisfy 1 <= k <= m = {m}, got {k}")));
    }
    let qr = big_int(q);
    let one = BigRational::one();
    let shift = m as i64 - n as i64;
    let head = &one - rpow(&qr, shift - k as i64) / big_int(q - 1);
    let tail: BigRational = (1..=k).map(|i| &one - rpow(&qr, shift - i as i64)).product();
    Ok(head * tail)
}

/// `1 − 1/q − 1/q²`, the square-matrix bound at `k = 1`.
pub fn square_rank_bound(q: u32) -> BigRational {
    BigRational::one() - big_ratio(1, q as u64) - big_ratio(1, q as u64 * q as u64)
}
