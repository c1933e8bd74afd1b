//! Generating functions of spectra.
//!
//! `𝒢(A)(u) = Σ_P S(A)(P) ∏_a u_a^{nP(a)}`, with a second block of variables
//! `v` for joint spectra. Polynomials are sparse maps from dense exponent
//! vectors `[u_0..u_{qx-1}, v_0..v_{qy-1}]` to exact rational coefficients.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::format_rational;
use crate::spectrum::{JointSpectrum, Spectrum};
use crate::types::TypeVector;

/// Sparse multivariate polynomial in `nu` variables `u` and `nv` variables `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPoly {
    nu: usize,
    nv: usize,
    terms: HashMap<Vec<u32>, BigRational>,
}

impl GenPoly {
    pub fn zero(nu: usize, nv: usize) -> Self {
        GenPoly { nu, nv, terms: HashMap::new() }
    }

    pub fn constant(nu: usize, nv: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nu, nv);
        p.add_term(vec![0; nu + nv], c);
        p
    }

    pub fn one(nu: usize, nv: usize) -> Self {
        Self::constant(nu, nv, BigRational::one())
    }

    /// The variable `u_a`.
    pub fn u(nu: usize, nv: usize, a: usize) -> Self {
        assert!(a < nu, "u index out of range");
        let mut e = vec![0; nu + nv];
        e[a] = 1;
        let mut p = Self::zero(nu, nv);
        p.add_term(e, BigRational::one());
        p
    }

    /// The variable `v_b`.
    pub fn v(nu: usize, nv: usize, b: usize) -> Self {
        assert!(b < nv, "v index out of range");
        let mut e = vec![0; nu + nv];
        e[nu + b] = 1;
        let mut p = Self::zero(nu, nv);
        p.add_term(e, BigRational::one());
        p
    }

    /// `(u)_⊕ = Σ_a u_a`.
    pub fn u_sum(nu: usize, nv: usize) -> Self {
        (0..nu).fold(Self::zero(nu, nv), |acc, a| &acc + &Self::u(nu, nv, a))
    }

    /// `(v)_⊕ = Σ_b v_b`.
    pub fn v_sum(nu: usize, nv: usize) -> Self {
        (0..nv).fold(Self::zero(nu, nv), |acc, b| &acc + &Self::v(nu, nv, b))
    }

    /// Monomial with the given exponents and coefficient.
    pub fn monomial(nu: usize, nv: usize, exponents: Vec<u32>, c: BigRational) -> Result<Self> {
        Error::check_dim(nu + nv, exponents.len())?;
        let mut p = Self::zero(nu, nv);
        p.add_term(exponents, c);
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    /// `𝒢(A)` for a unary spectrum.
    pub fn from_spectrum(s: &Spectrum) -> Self {
        let mut p = Self::zero(s.q() as usize, 0);
        for (t, v) in s.entries() {
            p.add_term(t.counts().to_vec(), v.clone());
        }
        p
    }

    /// `𝒢(B)(u, v)` for a joint spectrum.
    pub fn from_joint(s: &JointSpectrum) -> Self {
        let (qx, _) = s.input_shape();
        let (qy, _) = s.output_shape();
        let mut p = Self::zero(qx as usize, qy as usize);
        for ((tp, tq), v) in s.entries() {
            let mut e = tp.counts().to_vec();
            e.extend_from_slice(tq.counts());
            p.add_term(e, v.clone());
        }
        p
    }

    /// Inverse of [`GenPoly::from_spectrum`]; the polynomial must be homogeneous
    /// with coefficients forming a distribution.
    pub fn to_spectrum(&self) -> Result<Spectrum> {
        if self.nv != 0 {
            return Err(Error::ShapeMismatch("polynomial has v variables; use to_joint".into()));
        }
        let n = self.homogeneous_degree(0, self.nu)?;
        let entries = self
            .terms
            .iter()
            .map(|(e, c)| Ok((TypeVector::from_counts(e.clone())?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Spectrum::from_entries(self.nu as u32, n, entries)
    }

    /// Inverse of [`GenPoly::from_joint`].
    pub fn to_joint(&self) -> Result<JointSpectrum> {
        if self.nv == 0 {
            return Err(Error::ShapeMismatch("polynomial has no v variables".into()));
        }
        let n = self.homogeneous_degree(0, self.nu)?;
        let m = self.homogeneous_degree(self.nu, self.nu + self.nv)?;
        let entries = self
            .terms
            .iter()
            .map(|(e, c)| {
                let p = TypeVector::from_counts(e[..self.nu].to_vec())?;
                let q = TypeVector::from_counts(e[self.nu..].to_vec())?;
                Ok(((p, q), c.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        JointSpectrum::from_entries((self.nu as u32, n), (self.nv as u32, m), entries)
    }

    fn homogeneous_degree(&self, from: usize, to: usize) -> Result<usize> {
        let mut degree = None;
        for e in self.terms.keys() {
            let d: usize = e[from..to].iter().map(|&k| k as usize).sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::ShapeMismatch(format!(
                        "polynomial is not homogeneous (degrees {prev} and {d})"
                    )))
                }
                _ => {}
            }
        }
        degree.ok_or(Error::EmptySet)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact coefficient of the monomial with exponent vector `target`
    /// (zero when absent).
    pub fn coef(&self, target: &[u32]) -> Result<BigRational> {
        Error::check_dim(self.nu + self.nv, target.len())?;
        Ok(self.terms.get(target).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Terms sorted by exponent vector.
    pub fn sorted_terms(&self) -> BTreeMap<&[u32], &BigRational> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c)).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.nu, self.nv);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        out
    }

    /// Evaluates at a point given as `[u_0.., v_0..]`.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        Error::check_dim(self.nu + self.nv, point.len())?;
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Value at `u_a = v_b = 1`; equals 1 for the generating function of any spectrum.
    pub fn eval_at_ones(&self) -> BigRational {
        self.terms.values().sum()
    }

    fn check_compatible(&self, other: &GenPoly) {
        assert!(
            self.nu == other.nu && self.nv == other.nv,
            "incompatible variable sets ({}, {}) vs ({}, {})",
            self.nu,
            self.nv,
            other.nu,
            other.nv
        );
    }

    pub fn try_mul(&self, other: &GenPoly) -> Result<GenPoly> {
        if self.nu != other.nu || self.nv != other.nv {
            return Err(Error::ShapeMismatch("incompatible variable sets".into()));
        }
        Ok(self * other)
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> GenPoly {
        let mut acc = Self::one(self.nu, self.nv);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            exponents: Vec<u32>,
            coefficient: String,
        }
        let terms: Vec<Term> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| Term { exponents: e.to_vec(), coefficient: format_rational(c) })
            .collect();
        serde_json::json!({ "nu": self.nu, "nv": self.nv, "terms": terms })
    }
}

impl Add for &GenPoly {
    type Output = GenPoly;

    fn add(self, rhs: &GenPoly) -> GenPoly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Neg for &GenPoly {
    type Output = GenPoly;

    fn neg(self) -> GenPoly {
        GenPoly {
            nu: self.nu,
            nv: self.nv,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Sub for &GenPoly {
    type Output = GenPoly;

    fn sub(self, rhs: &GenPoly) -> GenPoly {
        self + &(-rhs)
    }
}

impl Mul for &GenPoly {
    type Output = GenPoly;

    fn mul(self, rhs: &GenPoly) -> GenPoly {
        self.check_compatible(rhs);
        let mut out = GenPoly::zero(self.nu, self.nv);
        let mut e = vec![0u32; self.nu + self.nv];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                for ((slot, &a), &b) in e.iter_mut().zip(ea).zip(eb) {
                    *slot = a + b;
                }
                out.add_term(e.clone(), ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{big_int, big_ratio};
    use crate::seq::{EnumLimits, TableMap};

    #[test]
    fn point_mass_is_single_monomial() {
        let p = GenPoly::from_spectrum(&Spectrum::point_mass(TypeVector::zero(3, 4)));
        assert_eq!(p.len(), 1);
        assert_eq!(p.coef(&[4, 0, 0]).unwrap(), big_int(1));
    }

    #[test]
    fn ambient_is_power_of_normalized_sum() {
        for (q, n) in [(2u32, 3u32), (3, 4), (5, 2)] {
            let base = GenPoly::u_sum(q as usize, 0).scale(&big_ratio(1, q as u64));
            let expected = base.pow(n);
            assert_eq!(GenPoly::from_spectrum(&Spectrum::ambient(q, n as usize)), expected);
        }
    }

    #[test]
    fn binomial_square_and_coefficients() {
        let half = GenPoly::u_sum(2, 0).scale(&big_ratio(1, 2));
        let sq = half.pow(2);
        assert_eq!(sq.coef(&[2, 0]).unwrap(), big_ratio(1, 4));
        assert_eq!(sq.coef(&[1, 1]).unwrap(), big_ratio(1, 2));
        assert_eq!(sq.coef(&[0, 2]).unwrap(), big_ratio(1, 4));
        let raw = GenPoly::u_sum(2, 0).pow(2);
        assert_eq!(raw.coef(&[1, 1]).unwrap(), big_int(2));
        assert_eq!(raw.coef(&[3, 0]).unwrap(), big_int(0));
        assert_eq!(half.pow(4).coef(&[2, 2]).unwrap(), big_ratio(6, 16));
        assert!(raw.coef(&[1]).is_err());
        let f = GenPoly::u_sum(2, 1);
        assert_eq!(&f * &GenPoly::one(2, 1), f);
    }

    #[test]
    fn repetition_generating_function() {
        // (1/q) Σ_a u_a v_a^c for a single-symbol repetition code
        let limits = EnumLimits::default();
        for (q, c) in [(2u32, 2usize), (3, 3)] {
            let rep = TableMap::from_fn(q, 1, q, c, &limits, |x| vec![x[0]; c]).unwrap();
            let g = GenPoly::from_joint(&JointSpectrum::of_map(&rep, &limits).unwrap());
            let qs = q as usize;
            let mut expected = GenPoly::zero(qs, qs);
            for a in 0..qs {
                expected = &expected + &(&GenPoly::u(qs, qs, a) * &GenPoly::v(qs, qs, a).pow(c as u32));
            }
            assert_eq!(g, expected.scale(&big_ratio(1, q as u64)));
        }
    }

    #[test]
    fn round_trip_and_eval() {
        let s = Spectrum::of_set(3, &[vec![0, 1, 2], vec![1, 1, 1], vec![2, 0, 0]]).unwrap();
        let g = GenPoly::from_spectrum(&s);
        assert_eq!(g.to_spectrum().unwrap(), s);
        assert_eq!(g.eval_at_ones(), big_int(1));
        assert_eq!(g.eval(&[big_int(1), big_int(1), big_int(1)]).unwrap(), big_int(1));
        let mixed = &GenPoly::u(2, 0, 0) + &GenPoly::u(2, 0, 0).pow(2);
        assert!(mixed.to_spectrum().is_err());
    }

    #[test]
    fn subtraction_prunes_zeros() {
        let x = GenPoly::u_sum(3, 0);
        assert!((&x - &x).is_empty());
    }
}
