//! Check-layer closed forms: the law of a random check sum, the expected
//! generating function of one check, the expected joint spectrum of `m`
//! parallel checks, and the `g₂` upper bound on it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::genfun::GenPoly;
use crate::numeric::{big_int, big_ratio, from_biguint, rpow};
use crate::spectrum::{JointSpectrum, Spectrum};
use crate::types::{multinomial, TypeVector};

/// `Pr{Σ_{i=1}^d C_i x_i = a}` for `C_i` i.i.d. uniform on `F_q \ {0}` and all
/// `x_i ≠ 0`, indexed by `a`.
pub fn checksum_distribution(q: u32, d: usize) -> Result<Vec<BigRational>> {
    FieldSpec::new(q)?;
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    let r = BigRational::new(BigInt::from(-1), BigInt::from(q - 1));
    let inv_q = big_ratio(1, q as u64);
    let zero = &inv_q * (BigRational::one() - rpow(&r, d as i64 - 1));
    let nonzero = &inv_q * (BigRational::one() - rpow(&r, d as i64));
    let mut out = vec![nonzero; q as usize];
    out[0] = zero;
    Ok(out)
}

/// `E[𝒢(F_d^CHK)](u, v)` with `q` variables `u` and `q` variables `v`:
/// `q^{-(d+1)} [ (u)⊕^d (v)⊕ + ((q u₀ − (u)⊕)/(q−1))^d (q v₀ − (v)⊕) ]`.
pub fn expected_chk_genfun(q: u32, d: usize) -> Result<GenPoly> {
    FieldSpec::new(q)?;
    let k = q as usize;
    let qr = big_int(q);
    let a = GenPoly::u_sum(k, k);
    let b = (&GenPoly::u(k, k, 0).scale(&qr) - &a).scale(&big_ratio(1, q as u64 - 1));
    let vs = GenPoly::v_sum(k, k);
    let v0q = &GenPoly::v(k, k, 0).scale(&qr) - &vs;
    let sum = &(&a.pow(d as u32) * &vs) + &(&b.pow(d as u32) * &v0q);
    Ok(sum.scale(&rpow(&big_ratio(1, q as u64), d as i64 + 1)))
}

/// A homogeneous polynomial in `(u₀, S)` stored by the power of `u₀`.
#[derive(Debug, Clone, PartialEq)]
struct Binary(Vec<BigRational>);

impl Binary {
    fn mul(&self, other: &Binary) -> Binary {
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Binary(out)
    }

    fn pow(&self, k: usize) -> Binary {
        let mut acc = Binary(vec![BigRational::one()]);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    fn add_scaled(&self, other: &Binary, c: &BigRational) -> Binary {
        Binary(self.0.iter().zip(&other.0).map(|(a, b)| a + b * c).collect())
    }
}

/// Exact `E[S(⊙_{i=1}^m F_d^CHK)](P, Q)` for all `P ∈ 𝒫_{md}`, `Q ∈ 𝒫_m`.
///
/// The expected generating function of one check depends on `u` only
/// through `u₀` and `S = Σ_{a≠0} u_a`, so `g₁(u, Q)` is kept as a polynomial
/// in those two variables and coefficients of `u^{mdP}` are read off with
/// the multinomial that spreads `S^k` over the nonzero symbols.
#[derive(Debug, Clone)]
pub struct ExpectedChkSpectrum {
    q: u32,
    d: usize,
    m: usize,
    /// `(A^d + (q−1)B^d)^k (A^d − B^d)^{m−k}` for `k = Q(0)·m = 0..=m`.
    by_zero_count: Vec<Binary>,
    scale: BigRational,
}

impl ExpectedChkSpectrum {
    pub fn new(q: u32, d: usize, m: usize) -> Result<Self> {
        FieldSpec::new(q)?;
        if d == 0 || m == 0 {
            return Err(Error::invalid("d and m must be at least 1"));
        }
        let qm1 = big_int(q - 1);
        let a = Binary(vec![BigRational::one(), BigRational::one()]);
        let b = Binary(vec![-big_ratio(1, q as u64 - 1), BigRational::one()]);
        let (ad, bd) = (a.pow(d), b.pow(d));
        let x = ad.add_scaled(&bd, &qm1);
        let y = ad.add_scaled(&bd, &-BigRational::one());
        let by_zero_count = (0..=m).map(|k| x.pow(k).mul(&y.pow(m - k))).collect();
        let scale = rpow(&big_ratio(1, q as u64), (m * (d + 1)) as i64);
        Ok(ExpectedChkSpectrum { q, d, m, by_zero_count, scale })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `coef(g₁(u, Q), u^{mdP})`.
    pub fn value(&self, p: &TypeVector, q: &TypeVector) -> Result<BigRational> {
        self.check_shapes(p, q)?;
        let poly = &self.by_zero_count[q.count(0) as usize];
        let c = &poly.0[p.count(0) as usize];
        if c.is_zero() {
            return Ok(BigRational::zero());
        }
        let spread = from_biguint(multinomial(&p.counts()[1..]));
        Ok(c * spread * from_biguint(q.multinomial()) * &self.scale)
    }

    fn check_shapes(&self, p: &TypeVector, q: &TypeVector) -> Result<()> {
        if p.q() != self.q || p.n() != self.m * self.d {
            return Err(Error::ShapeMismatch(format!("input type {p} must lie in P_{}(F_{})", self.m * self.d, self.q)));
        }
        if q.q() != self.q || q.n() != self.m {
            return Err(Error::ShapeMismatch(format!("output type {q} must lie in P_{}(F_{})", self.m, self.q)));
        }
        Ok(())
    }

    /// The whole expected joint spectrum.
    pub fn table(&self) -> Result<JointSpectrum> {
        let mut entries = Vec::new();
        for p in TypeVector::all(self.q, self.m * self.d) {
            for q in TypeVector::all(self.q, self.m) {
                let v = self.value(&p, &q)?;
                if !v.is_zero() {
                    entries.push(((p.clone(), q), v));
                }
            }
        }
        JointSpectrum::from_entries((self.q, self.m * self.d), (self.q, self.m), entries)
    }

    /// `E[S_{𝒴|𝒳}(Q|P)] = E[S](P,Q) / S(𝒳^{md})(P)`.
    pub fn conditional(&self, p: &TypeVector, q: &TypeVector) -> Result<BigRational> {
        Ok(self.value(p, q)? / Spectrum::ambient_value(p))
    }

    /// `α(P, Q)` of the parallel check ensemble.
    pub fn alpha(&self, p: &TypeVector, q: &TypeVector) -> Result<BigRational> {
        Ok(self.conditional(p, q)? / Spectrum::ambient_value(q))
    }

    /// `g₂(O, P, Q) = g₁(O, Q) / O^{mdP}` for a distribution `O` on `F_q`.
    pub fn g2(&self, o: &[BigRational], p: &TypeVector, q: &TypeVector) -> Result<BigRational> {
        g2_bound(self.q, self.d, self.m, o, p, q)
    }
}

/// `g₂(O,P,Q) = C(m; mQ) q^{-m(d+1)} [1+(q−1)t^d]^{mQ(0)} [1−t^d]^{m(1−Q(0))} / ∏_a O(a)^{mdP(a)}`
/// with `t = (qO(0) − 1)/(q − 1)`. Requires `O(a) > 0` wherever `P(a) > 0`.
pub fn g2_bound(
    q: u32,
    d: usize,
    m: usize,
    o: &[BigRational],
    p: &TypeVector,
    qt: &TypeVector,
) -> Result<BigRational> {
    FieldSpec::new(q)?;
    Error::check_dim(q as usize, o.len())?;
    if p.q() != q || p.n() != m * d || qt.q() != q || qt.n() != m {
        return Err(Error::ShapeMismatch(format!("types {p}, {qt} do not fit q={q}, d={d}, m={m}")));
    }
    if o.iter().any(|x| x.is_negative()) || o.iter().sum::<BigRational>() != BigRational::one() {
        return Err(Error::invalid("O must be a probability distribution on F_q"));
    }
    let mut denom = BigRational::one();
    for (a, oa) in o.iter().enumerate() {
        let k = p.count(a);
        if k > 0 {
            if oa.is_zero() {
                return Err(Error::SideCondition { symbol: a });
            }
            denom *= rpow(oa, k as i64);
        }
    }
    let qr = big_int(q);
    let t = (&qr * &o[0] - BigRational::one()) / big_int(q - 1);
    let td = rpow(&t, d as i64);
    let zeros = qt.count(0) as i64;
    let x = BigRational::one() + big_int(q - 1) * &td;
    let y = BigRational::one() - &td;
    let head = from_biguint(qt.multinomial()) * rpow(&big_ratio(1, q as u64), (m * (d + 1)) as i64);
    Ok(head * rpow(&x, zeros) * rpow(&y, m as i64 - zeros) / denom)
}

/// Rational distributions on `F_q` with denominator `den` and full support,
/// in lexicographic order of numerators.
pub fn full_support_grid(q: u32, den: u32) -> Vec<Vec<BigRational>> {
    let mut out = Vec::new();
    let mut nums = vec![0u32; q as usize];
    fn rec(a: usize, left: u32, nums: &mut Vec<u32>, den: u32, out: &mut Vec<Vec<BigRational>>) {
        if a + 1 == nums.len() {
            if left > 0 {
                nums[a] = left;
                out.push(nums.iter().map(|&k| big_ratio(k as u64, den as u64)).collect());
            }
            return;
        }
        for k in 1..left {
            nums[a] = k;
            rec(a + 1, left - k, nums, den, out);
        }
    }
    if q as usize == 1 {
        return vec![vec![BigRational::one()]];
    }
    rec(0, den, &mut nums, den, &mut out);
    out
}

/// Collects `(P, Q) ↦ value` pairs of a spectrum into a map keyed by
/// `(P, Q)`, including zeros, for every pair of types at the given shapes.
pub fn dense_table(s: &JointSpectrum) -> BTreeMap<(TypeVector, TypeVector), BigRational> {
    let (qx, n) = s.input_shape();
    let (qy, m) = s.output_shape();
    let mut out = BTreeMap::new();
    for p in TypeVector::all(qx, n) {
        for q in TypeVector::all(qy, m) {
            let v = s.get(&p, &q);
            out.insert((p.clone(), q), v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::EnsembleKind;
    use crate::seq::EnumLimits;

    fn tv(c: &[u32]) -> TypeVector {
        TypeVector::from_counts(c.to_vec()).unwrap()
    }

    #[test]
    fn checksum_examples() {
        assert_eq!(checksum_distribution(3, 2).unwrap(), vec![big_ratio(1, 2), big_ratio(1, 4), big_ratio(1, 4)]);
        let five = checksum_distribution(5, 1).unwrap();
        assert!(five[0].is_zero());
        assert!(five[1..].iter().all(|p| *p == big_ratio(1, 4)));
        for d in 1..6 {
            let two = checksum_distribution(2, d).unwrap();
            let parity = (d % 2) as usize;
            assert!(two[parity].is_one());
        }
        assert!(checksum_distribution(4, 2).is_err());
    }

    #[test]
    fn genfun_normalized() {
        for (q, d) in [(2, 1), (3, 2), (5, 3)] {
            assert!(expected_chk_genfun(q, d).unwrap().eval_at_ones().is_one());
        }
    }

    #[test]
    fn single_check_genfun_matches_enumeration() {
        let limits = EnumLimits::default();
        for (q, d) in [(2, 1), (3, 2), (3, 3)] {
            let exact = EnsembleKind::Chk { q, d }.expected_joint_spectrum(&limits).unwrap();
            assert_eq!(expected_chk_genfun(q, d).unwrap(), GenPoly::from_joint(&exact), "q={q} d={d}");
        }
    }

    #[test]
    fn zero_pair_value() {
        let s = ExpectedChkSpectrum::new(3, 2, 1).unwrap();
        assert_eq!(s.value(&tv(&[2, 0, 0]), &tv(&[1, 0, 0])).unwrap(), big_ratio(1, 9));
        assert!(s.value(&tv(&[1, 0, 0]), &tv(&[1, 0, 0])).is_err());
    }

    #[test]
    fn table_sums_to_one_and_matches_genfun_power() {
        let s = ExpectedChkSpectrum::new(3, 2, 2).unwrap();
        let table = s.table().unwrap();
        let direct = expected_chk_genfun(3, 2).unwrap().pow(2).to_joint().unwrap();
        assert_eq!(table, direct);
    }

    #[test]
    fn g2_side_condition_and_uniform() {
        let o = vec![big_ratio(1, 2), big_ratio(1, 2), BigRational::zero()];
        let err = g2_bound(3, 2, 1, &o, &tv(&[0, 1, 1]), &tv(&[1, 0, 0])).unwrap_err();
        assert_eq!(err, Error::SideCondition { symbol: 2 });
        let u = vec![big_ratio(1, 3); 3];
        let s = ExpectedChkSpectrum::new(3, 2, 1).unwrap();
        for p in TypeVector::all(3, 2) {
            for q in TypeVector::all(3, 1) {
                assert!(s.value(&p, &q).unwrap() <= g2_bound(3, 2, 1, &u, &p, &q).unwrap());
            }
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(full_support_grid(3, 8).len(), 21);
        assert_eq!(full_support_grid(2, 24).len(), 23);
        assert!(full_support_grid(3, 8).iter().all(|o| o.iter().sum::<BigRational>().is_one()));
    }
}
