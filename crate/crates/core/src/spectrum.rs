//! Exact spectra of sets and maps.
//!
//! A spectrum is the distribution of types induced by drawing uniformly from
//! a set. Joint spectra do the same for sets of pairs; for a map `f` the set
//! is its relation `{(x, f(x))}`. Everything here is exact rational arithmetic.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational};
use crate::seq::{for_each_sequence, sequence_from_index, EnumLimits, SeqMap};
use crate::types::TypeVector;

/// Spectrum `S_𝒳(A)` of a set `A ⊆ 𝒳^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    q: u32,
    n: usize,
    entries: BTreeMap<TypeVector, BigRational>,
}

/// Joint spectrum `S_𝒳𝒴(B)` of a set `B ⊆ 𝒳^n × 𝒴^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSpectrum {
    qx: u32,
    n: usize,
    qy: u32,
    m: usize,
    entries: BTreeMap<(TypeVector, TypeVector), BigRational>,
}

/// A family of conditional distributions, one slice per conditioning type
/// with nonzero marginal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondSpectrum {
    given: (u32, usize),
    slices: BTreeMap<TypeVector, Spectrum>,
    target: (u32, usize),
}

fn ratio_of(count: &BigUint, total: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(count.clone()), BigInt::from(total.clone()))
}

fn check_sums_to_one<'a>(values: impl Iterator<Item = &'a BigRational>) -> Result<()> {
    let mut sum = BigRational::zero();
    for v in values {
        if v < &BigRational::zero() {
            return Err(Error::invalid("spectrum entries must be non-negative"));
        }
        sum += v;
    }
    if sum.is_one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("spectrum sums to {}, not 1", format_rational(&sum))))
    }
}

fn check_type(t: &TypeVector, q: u32, n: usize) -> Result<()> {
    if t.q() != q || t.n() != n {
        return Err(Error::ShapeMismatch(format!("type {t} is not in P_{n}(F_{q})")));
    }
    Ok(())
}

impl Spectrum {
    /// Builds a spectrum from explicit entries, validating shape and normalization.
    /// Zero entries are dropped.
    pub fn from_entries(
        q: u32,
        n: usize,
        entries: impl IntoIterator<Item = (TypeVector, BigRational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (t, v) in entries {
            check_type(&t, q, n)?;
            if !v.is_zero() {
                *map.entry(t).or_insert_with(BigRational::zero) += v;
            }
        }
        check_sums_to_one(map.values())?;
        Ok(Spectrum { q, n, entries: map })
    }

    pub(crate) fn from_counts(
        q: u32,
        n: usize,
        counts: BTreeMap<TypeVector, BigUint>,
        total: &BigUint,
    ) -> Self {
        let entries = counts
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| {
                let v = ratio_of(&c, total);
                (t, v)
            })
            .collect();
        Spectrum { q, n, entries }
    }

    pub fn point_mass(t: TypeVector) -> Self {
        Spectrum { q: t.q(), n: t.n(), entries: BTreeMap::from([(t, BigRational::one())]) }
    }

    /// `S_𝒳(𝒳^n)(P) = multinomial(P) / q^n`.
    pub fn ambient(q: u32, n: usize) -> Self {
        let total = BigUint::from(q).pow(n as u32);
        let counts = TypeVector::all(q, n).into_iter().map(|t| {
            let c = t.multinomial();
            (t, c)
        });
        Spectrum::from_counts(q, n, counts.collect(), &total)
    }

    /// Single value of the ambient spectrum, without building the whole table.
    pub fn ambient_value(t: &TypeVector) -> BigRational {
        let total = BigUint::from(t.q()).pow(t.n() as u32);
        ratio_of(&t.multinomial(), &total)
    }

    /// Spectrum of an explicit set of sequences over `{0..q}`. Duplicates are
    /// counted once, since `A` is a set.
    pub fn of_set(q: u32, set: &[Vec<u32>]) -> Result<Self> {
        let first = set.first().ok_or(Error::EmptySet)?;
        let n = first.len();
        let mut distinct: Vec<&Vec<u32>> = set.iter().collect();
        distinct.sort();
        distinct.dedup();
        let mut counts: BTreeMap<TypeVector, BigUint> = BTreeMap::new();
        for x in &distinct {
            if x.len() != n {
                return Err(Error::RaggedSet { expected: n, found: x.len() });
            }
            *counts.entry(TypeVector::of(q, x)?).or_default() += 1u32;
        }
        Ok(Spectrum::from_counts(q, n, counts, &BigUint::from(distinct.len())))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero entries in ascending type order.
    pub fn entries(&self) -> &BTreeMap<TypeVector, BigRational> {
        &self.entries
    }

    pub fn get(&self, t: &TypeVector) -> BigRational {
        self.entries.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.entries.values().sum()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(SpectrumRepr::from(self)).expect("spectrum serializes")
    }
}

impl JointSpectrum {
    pub fn from_entries(
        (qx, n): (u32, usize),
        (qy, m): (u32, usize),
        entries: impl IntoIterator<Item = ((TypeVector, TypeVector), BigRational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((p, q), v) in entries {
            check_type(&p, qx, n)?;
            check_type(&q, qy, m)?;
            if !v.is_zero() {
                *map.entry((p, q)).or_insert_with(BigRational::zero) += v;
            }
        }
        check_sums_to_one(map.values())?;
        Ok(JointSpectrum { qx, n, qy, m, entries: map })
    }

    pub(crate) fn from_counts(
        (qx, n): (u32, usize),
        (qy, m): (u32, usize),
        counts: BTreeMap<(TypeVector, TypeVector), BigUint>,
        total: &BigUint,
    ) -> Self {
        let entries = counts
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let v = ratio_of(&c, total);
                (k, v)
            })
            .collect();
        JointSpectrum { qx, n, qy, m, entries }
    }

    /// Joint spectrum of an explicit set of pairs.
    pub fn of_pairs(qx: u32, qy: u32, pairs: &[(Vec<u32>, Vec<u32>)]) -> Result<Self> {
        let (x0, y0) = pairs.first().ok_or(Error::EmptySet)?;
        let (n, m) = (x0.len(), y0.len());
        let mut distinct: Vec<&(Vec<u32>, Vec<u32>)> = pairs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let mut counts: BTreeMap<(TypeVector, TypeVector), BigUint> = BTreeMap::new();
        for (x, y) in &distinct {
            if x.len() != n {
                return Err(Error::RaggedSet { expected: n, found: x.len() });
            }
            if y.len() != m {
                return Err(Error::RaggedSet { expected: m, found: y.len() });
            }
            *counts.entry((TypeVector::of(qx, x)?, TypeVector::of(qy, y)?)).or_default() += 1u32;
        }
        Ok(JointSpectrum::from_counts((qx, n), (qy, m), counts, &BigUint::from(distinct.len())))
    }

    /// `S_𝒳𝒴(rl(f))` by exhaustive evaluation of `f` on `𝒳^n`.
    pub fn of_map<M: SeqMap + Sync + ?Sized>(f: &M, limits: &EnumLimits) -> Result<Self> {
        let (counts, total) = joint_type_counts(f, limits)?;
        let counts = counts.into_iter().map(|(k, c)| (k, BigUint::from(c))).collect();
        Ok(JointSpectrum::from_counts(
            (f.input_alphabet(), f.input_len()),
            (f.output_alphabet(), f.output_len()),
            counts,
            &BigUint::from(total),
        ))
    }

    /// Product spectrum `S_𝒳(A₁)·S_𝒴(A₂)`, the joint spectrum of `A₁ × A₂`.
    pub fn product(a: &Spectrum, b: &Spectrum) -> Self {
        let entries = a
            .entries
            .iter()
            .cartesian_product(b.entries.iter())
            .map(|((p, va), (q, vb))| ((p.clone(), q.clone()), va * vb))
            .collect();
        JointSpectrum { qx: a.q, n: a.n, qy: b.q, m: b.n, entries }
    }

    pub fn input_shape(&self) -> (u32, usize) {
        (self.qx, self.n)
    }

    pub fn output_shape(&self) -> (u32, usize) {
        (self.qy, self.m)
    }

    pub fn entries(&self) -> &BTreeMap<(TypeVector, TypeVector), BigRational> {
        &self.entries
    }

    pub fn get(&self, p: &TypeVector, q: &TypeVector) -> BigRational {
        // BTreeMap lookup needs an owned tuple key
        self.entries.get(&(p.clone(), q.clone())).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.entries.values().sum()
    }

    pub fn marginal_x(&self) -> Spectrum {
        let mut m: BTreeMap<TypeVector, BigRational> = BTreeMap::new();
        for ((p, _), v) in &self.entries {
            *m.entry(p.clone()).or_insert_with(BigRational::zero) += v;
        }
        Spectrum { q: self.qx, n: self.n, entries: m }
    }

    pub fn marginal_y(&self) -> Spectrum {
        let mut m: BTreeMap<TypeVector, BigRational> = BTreeMap::new();
        for ((_, q), v) in &self.entries {
            *m.entry(q.clone()).or_insert_with(BigRational::zero) += v;
        }
        Spectrum { q: self.qy, n: self.m, entries: m }
    }

    /// `S_{𝒴|𝒳}(Q|P) = S(P,Q) / S_𝒳(P)` for every `P` with `S_𝒳(P) > 0`.
    pub fn forward_conditional(&self) -> CondSpectrum {
        let marginal = self.marginal_x();
        let mut slices: BTreeMap<TypeVector, BTreeMap<TypeVector, BigRational>> = BTreeMap::new();
        for ((p, q), v) in &self.entries {
            let denom = &marginal.entries[p];
            slices.entry(p.clone()).or_default().insert(q.clone(), v / denom);
        }
        CondSpectrum::from_slices((self.qx, self.n), (self.qy, self.m), slices)
    }

    /// `S_{𝒳|𝒴}(P|Q) = S(P,Q) / S_𝒴(Q)` for every `Q` with `S_𝒴(Q) > 0`.
    pub fn backward_conditional(&self) -> CondSpectrum {
        let marginal = self.marginal_y();
        let mut slices: BTreeMap<TypeVector, BTreeMap<TypeVector, BigRational>> = BTreeMap::new();
        for ((p, q), v) in &self.entries {
            let denom = &marginal.entries[q];
            slices.entry(q.clone()).or_default().insert(p.clone(), v / denom);
        }
        CondSpectrum::from_slices((self.qy, self.m), (self.qx, self.n), slices)
    }

    /// Marginals and both conditionals in one pass.
    pub fn decompose(&self) -> Decomposition {
        Decomposition {
            marginal_x: self.marginal_x(),
            marginal_y: self.marginal_y(),
            forward: self.forward_conditional(),
            backward: self.backward_conditional(),
        }
    }

    /// Average of several joint spectra of the same shape (exact).
    pub fn average<'a>(spectra: impl IntoIterator<Item = &'a JointSpectrum>) -> Result<Self> {
        let mut iter = spectra.into_iter();
        let first = iter.next().ok_or(Error::EmptySet)?;
        let mut acc = first.entries.clone();
        let mut count = 1u64;
        for s in iter {
            if s.input_shape() != first.input_shape() || s.output_shape() != first.output_shape() {
                return Err(Error::ShapeMismatch("averaged spectra differ in shape".into()));
            }
            for (k, v) in &s.entries {
                *acc.entry(k.clone()).or_insert_with(BigRational::zero) += v;
            }
            count += 1;
        }
        let scale = BigRational::from_integer(BigInt::from(count));
        let entries = acc.into_iter().map(|(k, v)| (k, v / &scale)).collect();
        Ok(JointSpectrum { qx: first.qx, n: first.n, qy: first.qy, m: first.m, entries })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(JointSpectrumRepr::from(self)).expect("joint spectrum serializes")
    }
}

/// Output of [`JointSpectrum::decompose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub marginal_x: Spectrum,
    pub marginal_y: Spectrum,
    pub forward: CondSpectrum,
    pub backward: CondSpectrum,
}

impl CondSpectrum {
    fn from_slices(
        given: (u32, usize),
        target: (u32, usize),
        slices: BTreeMap<TypeVector, BTreeMap<TypeVector, BigRational>>,
    ) -> Self {
        let slices = slices
            .into_iter()
            .map(|(p, s)| (p, Spectrum { q: target.0, n: target.1, entries: s }))
            .collect();
        CondSpectrum { given, slices, target }
    }

    /// Builds a conditional spectrum, checking that each slice sums to one.
    pub fn from_entries(
        given: (u32, usize),
        target: (u32, usize),
        slices: impl IntoIterator<Item = (TypeVector, Spectrum)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, s) in slices {
            check_type(&p, given.0, given.1)?;
            if (s.q, s.n) != target {
                return Err(Error::ShapeMismatch(format!(
                    "slice for {p} has shape ({}, {}), expected {target:?}",
                    s.q, s.n
                )));
            }
            check_sums_to_one(s.entries.values())?;
            map.insert(p, s);
        }
        Ok(CondSpectrum { given, slices: map, target })
    }

    /// The diagonal family `1{P = Q}` (as distributions) from `P_n` to `P_m`.
    ///
    /// Requires every `P ∈ 𝒫_n` to be realizable at length `m`, i.e. `n | m`.
    pub fn diagonal(q: u32, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m % n != 0 {
            return Err(Error::invalid(format!("diagonal needs n | m, got n={n}, m={m}")));
        }
        let k = (m / n) as u32;
        let slices = TypeVector::all(q, n)
            .into_iter()
            .map(|p| {
                let s = Spectrum::point_mass(p.scaled(k));
                (p, s)
            })
            .collect();
        Ok(CondSpectrum { given: (q, n), slices, target: (q, m) })
    }

    pub fn given_shape(&self) -> (u32, usize) {
        self.given
    }

    pub fn target_shape(&self) -> (u32, usize) {
        self.target
    }

    pub fn slices(&self) -> &BTreeMap<TypeVector, Spectrum> {
        &self.slices
    }

    /// The conditional distribution given `p`; an error if `p` has zero marginal.
    pub fn slice(&self, p: &TypeVector) -> Result<&Spectrum> {
        self.slices.get(p).ok_or_else(|| Error::ZeroProbabilityCondition(p.counts().to_vec()))
    }

    pub fn value(&self, target: &TypeVector, given: &TypeVector) -> Result<BigRational> {
        Ok(self.slice(given)?.get(target))
    }

    /// Chain rule for `G ∘ Σ ∘ F`:
    /// `result(Q|O) = Σ_P self(P|O) · inner(Q|P)`.
    pub fn compose(&self, inner: &CondSpectrum) -> Result<CondSpectrum> {
        if self.target != inner.given {
            return Err(Error::ShapeMismatch(format!(
                "outer produces {:?} but inner expects {:?}",
                self.target, inner.given
            )));
        }
        let mut slices = BTreeMap::new();
        for (o, outer_slice) in &self.slices {
            let mut acc: BTreeMap<TypeVector, BigRational> = BTreeMap::new();
            for (p, weight) in &outer_slice.entries {
                let inner_slice = inner.slice(p)?;
                for (q, v) in &inner_slice.entries {
                    *acc.entry(q.clone()).or_insert_with(BigRational::zero) += weight * v;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            slices.insert(o.clone(), Spectrum { q: inner.target.0, n: inner.target.1, entries: acc });
        }
        Ok(CondSpectrum { given: self.given, slices, target: inner.target })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(CondSpectrumRepr::from(self)).expect("conditional spectrum serializes")
    }
}

/// Free-function form of [`CondSpectrum::compose`].
pub fn chain_rule_compose(outer: &CondSpectrum, inner: &CondSpectrum) -> Result<CondSpectrum> {
    outer.compose(inner)
}

/// Counts `(P_x, P_{f(x)})` over the whole domain. Returns counts and `q^n`.
pub(crate) fn joint_type_counts<M: SeqMap + Sync + ?Sized>(
    f: &M,
    limits: &EnumLimits,
) -> Result<(BTreeMap<(TypeVector, TypeVector), u64>, u64)> {
    let (qx, n, qy, m) = (f.input_alphabet(), f.input_len(), f.output_alphabet(), f.output_len());
    let total = limits.check_domain(qx, n)?;
    const CHUNK: u64 = 1 << 12;
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<HashMap<(Vec<u32>, Vec<u32>), u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut x = sequence_from_index(qx, n, start);
            let mut y = vec![0u32; m];
            let mut px = vec![0u32; qx as usize];
            let mut py = vec![0u32; qy as usize];
            let mut local: HashMap<(Vec<u32>, Vec<u32>), u64> = HashMap::new();
            for _ in start..end {
                f.apply_into(&x, &mut y);
                TypeVector::count_into(&x, &mut px);
                TypeVector::count_into(&y, &mut py);
                match local.get_mut(&(px.clone(), py.clone())) {
                    Some(c) => *c += 1,
                    None => {
                        local.insert((px.clone(), py.clone()), 1);
                    }
                }
                increment(&mut x, qx);
            }
            local
        })
        .collect();
    let mut counts = BTreeMap::new();
    for part in partials {
        for ((p, q), c) in part {
            let key = (TypeVector::from_counts(p)?, TypeVector::from_counts(q)?);
            *counts.entry(key).or_insert(0) += c;
        }
    }
    Ok((counts, total))
}

fn increment(x: &mut [u32], q: u32) {
    for a in x.iter_mut() {
        *a += 1;
        if *a < q {
            return;
        }
        *a = 0;
    }
}

/// Spectrum of `ker f = {x : f(x) = 0^m}`. Never empty because `f(0) = 0`
/// for linear maps; for other maps an empty kernel is reported as an error.
pub fn kernel_spectrum<M: SeqMap + ?Sized>(f: &M, limits: &EnumLimits) -> Result<Spectrum> {
    let (q, n) = (f.input_alphabet(), f.input_len());
    limits.check_domain(q, n)?;
    let mut y = vec![0u32; f.output_len()];
    let mut counts: BTreeMap<TypeVector, BigUint> = BTreeMap::new();
    let mut size = 0u64;
    let mut px = vec![0u32; q as usize];
    for_each_sequence(q, n, |x| {
        f.apply_into(x, &mut y);
        if y.iter().all(|&b| b == 0) {
            TypeVector::count_into(x, &mut px);
            let t = TypeVector::from_counts(px.clone()).expect("q >= 1");
            *counts.entry(t).or_default() += 1u32;
            size += 1;
        }
    });
    if size == 0 {
        return Err(Error::EmptySet);
    }
    Ok(Spectrum::from_counts(q, n, counts, &BigUint::from(size)))
}

/// `α(P,Q) = E[S(P,Q)] / (S_𝒳(𝒳^n)(P)·S_𝒴(𝒴^m)(Q))` over every pair of types,
/// including pairs where the expected spectrum vanishes.
pub fn alpha_table(expected: &JointSpectrum) -> BTreeMap<(TypeVector, TypeVector), BigRational> {
    let (qx, n) = expected.input_shape();
    let (qy, m) = expected.output_shape();
    let amb_x = Spectrum::ambient(qx, n);
    let amb_y = Spectrum::ambient(qy, m);
    let mut out = BTreeMap::new();
    for (p, ap) in &amb_x.entries {
        for (q, aq) in &amb_y.entries {
            let v = expected.get(p, q) / (ap * aq);
            out.insert((p.clone(), q.clone()), v);
        }
    }
    out
}

/// `Pr{type(f(σ(x))) = Q}` averaged exactly over all `n!` permutations `σ`,
/// with `σ(x)_i = x_{σ(i)}`.
pub fn permuted_output_type_prob<M: SeqMap + ?Sized>(
    f: &M,
    x: &[u32],
    target: &TypeVector,
    limits: &EnumLimits,
) -> Result<BigRational> {
    let n = f.input_len();
    Error::check_dim(n, x.len())?;
    limits.check_permutations(n)?;
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut permuted = vec![0u32; n];
    let mut y = vec![0u32; f.output_len()];
    let mut py = vec![0u32; f.output_alphabet() as usize];
    for perm in (0..n).permutations(n) {
        for (slot, &src) in permuted.iter_mut().zip(&perm) {
            *slot = x[src];
        }
        f.apply_into(&permuted, &mut y);
        TypeVector::count_into(&y, &mut py);
        if py == target.counts() {
            hits += 1;
        }
        total += 1;
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(total)))
}

#[derive(Serialize, Deserialize)]
struct UnaryEntry {
    #[serde(rename = "P")]
    p: Vec<u32>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    arity: u8,
    q: u32,
    n: usize,
    entries: Vec<UnaryEntry>,
}

impl From<&Spectrum> for SpectrumRepr {
    fn from(s: &Spectrum) -> Self {
        SpectrumRepr {
            arity: 1,
            q: s.q,
            n: s.n,
            entries: s
                .entries
                .iter()
                .map(|(t, v)| UnaryEntry { p: t.counts().to_vec(), value: format_rational(v) })
                .collect(),
        }
    }
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;

    fn try_from(r: SpectrumRepr) -> Result<Self> {
        if r.arity != 1 {
            return Err(Error::ShapeMismatch(format!("expected arity 1, found {}", r.arity)));
        }
        let entries = r
            .entries
            .into_iter()
            .map(|e| Ok((TypeVector::from_counts(e.p)?, parse_value(&e.value)?)))
            .collect::<Result<Vec<_>>>()?;
        Spectrum::from_entries(r.q, r.n, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct JointEntry {
    #[serde(rename = "P")]
    p: Vec<u32>,
    #[serde(rename = "Q")]
    q: Vec<u32>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct JointSpectrumRepr {
    arity: u8,
    qx: u32,
    n: usize,
    qy: u32,
    m: usize,
    entries: Vec<JointEntry>,
}

impl From<&JointSpectrum> for JointSpectrumRepr {
    fn from(s: &JointSpectrum) -> Self {
        JointSpectrumRepr {
            arity: 2,
            qx: s.qx,
            n: s.n,
            qy: s.qy,
            m: s.m,
            entries: s
                .entries
                .iter()
                .map(|((p, q), v)| JointEntry {
                    p: p.counts().to_vec(),
                    q: q.counts().to_vec(),
                    value: format_rational(v),
                })
                .collect(),
        }
    }
}

impl TryFrom<JointSpectrumRepr> for JointSpectrum {
    type Error = Error;

    fn try_from(r: JointSpectrumRepr) -> Result<Self> {
        if r.arity != 2 {
            return Err(Error::ShapeMismatch(format!("expected arity 2, found {}", r.arity)));
        }
        let entries = r
            .entries
            .into_iter()
            .map(|e| {
                let key = (TypeVector::from_counts(e.p)?, TypeVector::from_counts(e.q)?);
                Ok((key, parse_value(&e.value)?))
            })
            .collect::<Result<Vec<_>>>()?;
        JointSpectrum::from_entries((r.qx, r.n), (r.qy, r.m), entries)
    }
}

#[derive(Serialize, Deserialize)]
struct CondEntry {
    given: Vec<u32>,
    target: Vec<u32>,
    value: String,
}

#[derive(Serialize, Deserialize)]
struct CondSpectrumRepr {
    given_q: u32,
    given_n: usize,
    target_q: u32,
    target_n: usize,
    entries: Vec<CondEntry>,
}

impl From<&CondSpectrum> for CondSpectrumRepr {
    fn from(c: &CondSpectrum) -> Self {
        let entries = c
            .slices
            .iter()
            .flat_map(|(p, s)| {
                s.entries.iter().map(move |(q, v)| CondEntry {
                    given: p.counts().to_vec(),
                    target: q.counts().to_vec(),
                    value: format_rational(v),
                })
            })
            .collect();
        CondSpectrumRepr {
            given_q: c.given.0,
            given_n: c.given.1,
            target_q: c.target.0,
            target_n: c.target.1,
            entries,
        }
    }
}

impl TryFrom<CondSpectrumRepr> for CondSpectrum {
    type Error = Error;

    fn try_from(r: CondSpectrumRepr) -> Result<Self> {
        let mut grouped: BTreeMap<TypeVector, Vec<(TypeVector, BigRational)>> = BTreeMap::new();
        for e in r.entries {
            grouped
                .entry(TypeVector::from_counts(e.given)?)
                .or_default()
                .push((TypeVector::from_counts(e.target)?, parse_value(&e.value)?));
        }
        let slices = grouped
            .into_iter()
            .map(|(p, entries)| Ok((p, Spectrum::from_entries(r.target_q, r.target_n, entries)?)))
            .collect::<Result<Vec<_>>>()?;
        CondSpectrum::from_entries((r.given_q, r.given_n), (r.target_q, r.target_n), slices)
    }
}

fn parse_value(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::invalid(format!("`{s}` is not a rational")))
}

macro_rules! serde_via_repr {
    ($ty:ty, $repr:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                <$repr>::from(self).serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let repr = <$repr>::deserialize(d)?;
                <$ty>::try_from(repr).map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_repr!(Spectrum, SpectrumRepr);
serde_via_repr!(JointSpectrum, JointSpectrumRepr);
serde_via_repr!(CondSpectrum, CondSpectrumRepr);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::big_ratio;
    use crate::seq::TableMap;

    fn tv(c: &[u32]) -> TypeVector {
        TypeVector::from_counts(c.to_vec()).unwrap()
    }

    fn limits() -> EnumLimits {
        EnumLimits::default()
    }

    #[test]
    fn ambient_examples() {
        let s1 = Spectrum::ambient(1 + 1, 1);
        assert_eq!(s1.get(&tv(&[1, 0])), big_ratio(1, 2));
        assert_eq!(s1.get(&tv(&[0, 1])), big_ratio(1, 2));
        let s2 = Spectrum::ambient(2, 2);
        assert_eq!(s2.get(&tv(&[2, 0])), big_ratio(1, 4));
        assert_eq!(s2.get(&tv(&[1, 1])), big_ratio(1, 2));
        assert_eq!(s2.get(&tv(&[0, 2])), big_ratio(1, 4));
        // enumerate all 8 binary triples: 3 have exactly one 1
        assert_eq!(Spectrum::ambient(2, 3).get(&tv(&[2, 1])), big_ratio(3, 8));
        assert!(Spectrum::ambient(3, 4).total().is_one());
    }

    #[test]
    fn set_examples() {
        let s = Spectrum::of_set(2, &[vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(s.entries().len(), 2);
        assert_eq!(s.get(&tv(&[2, 0])), big_ratio(1, 2));
        assert_eq!(s.get(&tv(&[0, 2])), big_ratio(1, 2));

        let s = Spectrum::of_set(2, &[vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(s.get(&tv(&[1, 1])), big_ratio(2, 3));
        assert_eq!(s.get(&tv(&[0, 2])), big_ratio(1, 3));

        let mut all = Vec::new();
        for_each_sequence(3, 3, |x| all.push(x.to_vec()));
        assert_eq!(Spectrum::of_set(3, &all).unwrap(), Spectrum::ambient(3, 3));

        assert_eq!(Spectrum::of_set(2, &[]), Err(Error::EmptySet));
        assert!(matches!(
            Spectrum::of_set(2, &[vec![0], vec![0, 1]]),
            Err(Error::RaggedSet { .. })
        ));
    }

    #[test]
    fn joint_of_identity_and_zero_maps() {
        let id = TableMap::from_fn(2, 2, 2, 2, &limits(), |x| x.to_vec()).unwrap();
        let j = JointSpectrum::of_map(&id, &limits()).unwrap();
        let amb = Spectrum::ambient(2, 2);
        for p in TypeVector::all(2, 2) {
            for q in TypeVector::all(2, 2) {
                let expected = if p == q { amb.get(&p) } else { BigRational::zero() };
                assert_eq!(j.get(&p, &q), expected);
            }
        }
        let zero = TableMap::from_fn(2, 2, 2, 2, &limits(), |_| vec![0, 0]).unwrap();
        let j = JointSpectrum::of_map(&zero, &limits()).unwrap();
        for p in TypeVector::all(2, 2) {
            assert_eq!(j.get(&p, &tv(&[2, 0])), amb.get(&p));
        }
    }

    #[test]
    fn joint_of_repetition_and_its_conditionals() {
        let rep = TableMap::from_fn(2, 1, 2, 2, &limits(), |x| vec![x[0], x[0]]).unwrap();
        let j = JointSpectrum::of_map(&rep, &limits()).unwrap();
        assert_eq!(j.entries().len(), 2);
        assert_eq!(j.get(&tv(&[1, 0]), &tv(&[2, 0])), big_ratio(1, 2));
        assert_eq!(j.get(&tv(&[0, 1]), &tv(&[0, 2])), big_ratio(1, 2));
        let d = j.decompose();
        assert_eq!(d.forward.value(&tv(&[2, 0]), &tv(&[1, 0])).unwrap(), BigRational::one());
        assert_eq!(d.backward.value(&tv(&[0, 1]), &tv(&[0, 2])).unwrap(), BigRational::one());
        // (1,1) never occurs as output type
        assert_eq!(d.backward.slice(&tv(&[1, 1])), Err(Error::ZeroProbabilityCondition(vec![1, 1])));
    }

    #[test]
    fn product_spectrum_has_independent_conditionals() {
        let a = Spectrum::of_set(3, &[vec![0, 1], vec![2, 2], vec![1, 0]]).unwrap();
        let b = Spectrum::ambient(2, 3);
        let j = JointSpectrum::product(&a, &b);
        assert!(j.total().is_one());
        let fwd = j.forward_conditional();
        for p in a.entries().keys() {
            assert_eq!(fwd.slice(p).unwrap(), &b);
        }
    }

    #[test]
    fn kernel_examples() {
        let id = TableMap::from_fn(2, 3, 2, 3, &limits(), |x| x.to_vec()).unwrap();
        assert_eq!(kernel_spectrum(&id, &limits()).unwrap(), Spectrum::point_mass(TypeVector::zero(2, 3)));
        let zero = TableMap::from_fn(2, 2, 2, 1, &limits(), |_| vec![0]).unwrap();
        assert_eq!(kernel_spectrum(&zero, &limits()).unwrap(), Spectrum::ambient(2, 2));
        let parity = TableMap::from_fn(2, 2, 2, 1, &limits(), |x| vec![(x[0] + x[1]) % 2]).unwrap();
        let k = kernel_spectrum(&parity, &limits()).unwrap();
        assert_eq!(k.get(&tv(&[2, 0])), big_ratio(1, 2));
        assert_eq!(k.get(&tv(&[0, 2])), big_ratio(1, 2));
    }

    #[test]
    fn permuted_output_examples() {
        let id = TableMap::from_fn(2, 3, 2, 3, &limits(), |x| x.to_vec()).unwrap();
        let x = [1, 0, 1];
        assert!(permuted_output_type_prob(&id, &x, &tv(&[1, 2]), &limits()).unwrap().is_one());
        assert!(permuted_output_type_prob(&id, &x, &tv(&[2, 1]), &limits()).unwrap().is_zero());

        let proj = TableMap::from_fn(2, 2, 2, 1, &limits(), |x| vec![x[0]]).unwrap();
        let p = permuted_output_type_prob(&proj, &[0, 1], &tv(&[0, 1]), &limits()).unwrap();
        assert_eq!(p, big_ratio(1, 2));

        let constant = TableMap::from_fn(2, 2, 2, 2, &limits(), |_| vec![1, 0]).unwrap();
        assert!(permuted_output_type_prob(&constant, &[1, 1], &tv(&[1, 1]), &limits()).unwrap().is_one());
    }

    #[test]
    fn chain_rule_with_diagonal_factors() {
        let rep = TableMap::from_fn(3, 1, 3, 2, &limits(), |x| vec![x[0], x[0]]).unwrap();
        let g = TableMap::from_fn(3, 2, 3, 1, &limits(), |x| vec![(x[0] + 2 * x[1]) % 3]).unwrap();
        let ef = JointSpectrum::of_map(&rep, &limits()).unwrap().forward_conditional();
        let eg = JointSpectrum::of_map(&g, &limits()).unwrap().forward_conditional();
        let diag_in = CondSpectrum::diagonal(3, 2, 2).unwrap();
        assert_eq!(diag_in.compose(&eg).unwrap(), eg);
        let diag_out = CondSpectrum::diagonal(3, 1, 1).unwrap();
        let composed = eg.compose(&diag_out).unwrap();
        assert_eq!(composed, eg);
        assert!(ef.compose(&ef).is_err());
    }

    #[test]
    fn json_round_trips_and_validates() {
        let rep = TableMap::from_fn(2, 3, 2, 2, &limits(), |x| vec![x[0], x[1]]).unwrap();
        let j = JointSpectrum::of_map(&rep, &limits()).unwrap();
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.starts_with(r#"{"arity":2,"qx":2,"n":3,"qy":2,"m":2,"entries":[{"P":"#));
        assert_eq!(serde_json::from_str::<JointSpectrum>(&text).unwrap(), j);

        let c = j.forward_conditional();
        let ctext = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<CondSpectrum>(&ctext).unwrap(), c);

        let bad = r#"{"arity":1,"q":2,"n":1,"entries":[{"P":[1,0],"value":"1/3"}]}"#;
        assert!(serde_json::from_str::<Spectrum>(bad).is_err());
    }
}
