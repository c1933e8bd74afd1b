//! Random code ensembles: description, sampling, enumeration of
//! realizations, and exact expected spectra by full enumeration.
//!
//! Every ensemble here is a finite family of equiprobable realizations, so
//! `realization(i)` for `i < realization_count()` enumerates it exactly and
//! `sample` draws from the same law.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{
    chk_parallel, ldgm_from_parts, ldgm_output_len, rep_parallel, sample_chk, sample_rlc,
    serial_concat, Interleaver, LinearCodeMatrix,
};
use crate::error::{Error, Result};
use crate::field::{FieldMatrix, FieldSpec};
use crate::rng::stream_rng;
use crate::seq::{checked_pow, for_each_sequence, EnumLimits, SeqMap};
use crate::numeric::big_int;
use crate::spectrum::{CondSpectrum, JointSpectrum, Spectrum};
use crate::types::TypeVector;

/// The shape of a code ensemble. `SerialConcat` puts a fresh uniform
/// interleaver between its two stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Uniform `m × n` generator.
    Rlc { q: u32, n: usize, m: usize },
    /// Single check `Σ C_i x_i`, `F_q^d → F_q`, `C_i` uniform on `F_q \ {0}`.
    Chk { q: u32, d: usize },
    /// `m` independent checks side by side, `F_q^{md} → F_q^m`.
    ChkParallel { q: u32, d: usize, m: usize },
    /// Deterministic `⊙_{i=1}^n f_c^REP`.
    RepParallel { q: u32, c: usize, n: usize },
    /// Regular LDGM `(⊙ CHK) ∘ Σ_{cn} ∘ (⊙ REP)`.
    Ldgm { q: u32, n: usize, c: usize, d: usize },
    SerialConcat { outer: Box<EnsembleKind>, inner: Box<EnsembleKind> },
    /// A single deterministic code.
    Fixed { generator: LinearCodeMatrix },
}

/// An ensemble together with the master seed used for sampling it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, seed: u64) -> Result<Self> {
        kind.validate()?;
        Ok(EnsembleSpec { kind, seed })
    }

    /// Realization number `index` of the seeded stream.
    pub fn sample_indexed(&self, index: u64) -> Result<LinearCodeMatrix> {
        self.kind.sample(&mut stream_rng(self.seed, index))
    }
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// The permutation with Lehmer-code rank `index` among all `n!`.
fn permutation_from_index(n: usize, mut index: u128) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut perm = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let f = factorial(k - 1).expect("guarded by the realization limit");
        let pos = (index / f) as usize;
        index %= f;
        perm.push(pool.remove(pos));
    }
    perm
}

fn digits(mut index: u128, base: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((index % base as u128) as u32);
        index /= base as u128;
    }
    out
}

impl EnsembleKind {
    pub fn q(&self) -> u32 {
        match self {
            EnsembleKind::Rlc { q, .. }
            | EnsembleKind::Chk { q, .. }
            | EnsembleKind::ChkParallel { q, .. }
            | EnsembleKind::RepParallel { q, .. }
            | EnsembleKind::Ldgm { q, .. } => *q,
            EnsembleKind::SerialConcat { outer, .. } => outer.q(),
            EnsembleKind::Fixed { generator } => generator.q(),
        }
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.q())
    }

    pub fn input_len(&self) -> usize {
        match self {
            EnsembleKind::Rlc { n, .. } => *n,
            EnsembleKind::Chk { d, .. } => *d,
            EnsembleKind::ChkParallel { d, m, .. } => d * m,
            EnsembleKind::RepParallel { n, .. } | EnsembleKind::Ldgm { n, .. } => *n,
            EnsembleKind::SerialConcat { outer, .. } => outer.input_len(),
            EnsembleKind::Fixed { generator } => generator.n(),
        }
    }

    pub fn output_len(&self) -> usize {
        match self {
            EnsembleKind::Rlc { m, .. } => *m,
            EnsembleKind::Chk { .. } => 1,
            EnsembleKind::ChkParallel { m, .. } => *m,
            EnsembleKind::RepParallel { c, n, .. } => c * n,
            EnsembleKind::Ldgm { n, c, d, .. } => n * c / d,
            EnsembleKind::SerialConcat { inner, .. } => inner.output_len(),
            EnsembleKind::Fixed { generator } => generator.m(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.field()?;
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::invalid(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match self {
            EnsembleKind::Rlc { n, m, .. } => {
                positive("n", *n)?;
                positive("m", *m)
            }
            EnsembleKind::Chk { d, .. } => positive("d", *d),
            EnsembleKind::ChkParallel { d, m, .. } => {
                positive("d", *d)?;
                positive("m", *m)
            }
            EnsembleKind::RepParallel { c, n, .. } => {
                positive("c", *c)?;
                positive("n", *n)
            }
            EnsembleKind::Ldgm { n, c, d, .. } => ldgm_output_len(*n, *c, *d).map(|_| ()),
            EnsembleKind::SerialConcat { outer, inner } => {
                outer.validate()?;
                inner.validate()?;
                if outer.q() != inner.q() {
                    return Err(Error::ShapeMismatch("outer and inner ensembles use different fields".into()));
                }
                if outer.output_len() != inner.input_len() {
                    return Err(Error::ShapeMismatch(format!(
                        "outer output length {} does not match inner input length {}",
                        outer.output_len(),
                        inner.input_len()
                    )));
                }
                Ok(())
            }
            EnsembleKind::Fixed { .. } => Ok(()),
        }
    }

    /// Number of equiprobable realizations, `None` on overflow.
    pub fn realization_count(&self) -> Option<u128> {
        let q = self.q() as u128;
        match self {
            EnsembleKind::Rlc { n, m, .. } => checked_pow(q, n * m),
            EnsembleKind::Chk { d, .. } => checked_pow(q - 1, *d),
            EnsembleKind::ChkParallel { d, m, .. } => checked_pow(q - 1, d * m),
            EnsembleKind::RepParallel { .. } | EnsembleKind::Fixed { .. } => Some(1),
            EnsembleKind::Ldgm { n, c, .. } => factorial(n * c)?.checked_mul(checked_pow(q - 1, n * c)?),
            EnsembleKind::SerialConcat { outer, inner } => outer
                .realization_count()?
                .checked_mul(factorial(outer.output_len())?)?
                .checked_mul(inner.realization_count()?),
        }
    }

    /// Realization `index` in a fixed enumeration of the ensemble.
    pub fn realization(&self, index: u128) -> Result<LinearCodeMatrix> {
        let count = self.realization_count().ok_or(Error::EnumerationLimit {
            what: "ensemble enumeration",
            size: u128::MAX,
            limit: u128::MAX,
        })?;
        if index >= count {
            return Err(Error::invalid(format!("realization {index} out of range (count {count})")));
        }
        let field = self.field()?;
        match self {
            EnsembleKind::Rlc { n, m, .. } => {
                let e = digits(index, field.q(), n * m);
                let rows: Vec<Vec<u32>> = e.chunks(*n).map(<[u32]>::to_vec).collect();
                LinearCodeMatrix::new(FieldMatrix::from_rows(field, &rows)?)
            }
            EnsembleKind::Chk { d, .. } => {
                let coeffs = nonzero_digits(index, field.q(), *d);
                chk_parallel(field, *d, &coeffs)
            }
            EnsembleKind::ChkParallel { d, m, .. } => {
                let coeffs = nonzero_digits(index, field.q(), d * m);
                chk_parallel(field, *d, &coeffs)
            }
            EnsembleKind::RepParallel { c, n, .. } => rep_parallel(field, *c, *n),
            EnsembleKind::Fixed { generator } => Ok(generator.clone()),
            EnsembleKind::Ldgm { n, c, d, .. } => {
                let k = (field.q() - 1) as u128;
                let coeff_count = checked_pow(k, n * c).expect("counted above");
                let coeffs = nonzero_digits(index % coeff_count, field.q(), n * c);
                let perm = Interleaver::new(permutation_from_index(n * c, index / coeff_count))?;
                ldgm_from_parts(field, *n, *c, *d, &perm, &coeffs)
            }
            EnsembleKind::SerialConcat { outer, inner } => {
                let inner_count = inner.realization_count().expect("counted above");
                let perms = factorial(outer.output_len()).expect("counted above");
                let g = inner.realization(index % inner_count)?;
                let rest = index / inner_count;
                let sigma = Interleaver::new(permutation_from_index(outer.output_len(), rest % perms))?;
                let f = outer.realization(rest / perms)?;
                serial_concat(&f, &sigma, &g)
            }
        }
    }

    /// One realization drawn from the ensemble law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LinearCodeMatrix> {
        self.validate()?;
        let field = self.field()?;
        match self {
            EnsembleKind::Rlc { n, m, .. } => sample_rlc(field, *n, *m, rng),
            EnsembleKind::Chk { d, .. } => chk_parallel(field, *d, &sample_chk(field, *d, rng)),
            EnsembleKind::ChkParallel { d, m, .. } => chk_parallel(field, *d, &sample_chk(field, d * m, rng)),
            EnsembleKind::RepParallel { c, n, .. } => rep_parallel(field, *c, *n),
            EnsembleKind::Fixed { generator } => Ok(generator.clone()),
            EnsembleKind::Ldgm { n, c, d, .. } => Ok(crate::code::sample_ldgm(field, *n, *c, *d, rng)?.code),
            EnsembleKind::SerialConcat { outer, inner } => {
                let f = outer.sample(rng)?;
                let sigma = Interleaver::uniform(outer.output_len(), rng);
                let g = inner.sample(rng)?;
                serial_concat(&f, &sigma, &g)
            }
        }
    }

    /// `E[S_𝒳𝒴(F)]` exactly, by enumerating every realization and every input.
    pub fn expected_joint_spectrum(&self, limits: &EnumLimits) -> Result<JointSpectrum> {
        self.validate()?;
        let (q, n, m) = (self.q(), self.input_len(), self.output_len());
        let count = self.realization_count();
        limits.check_realizations(count)?;
        let domain = limits.check_domain(q, n)? as u128;
        let count = count.expect("checked");
        let counts = (0..count)
            .into_par_iter()
            .map(|i| self.realization(i).map(|f| type_pair_counts(&f)))
            .try_reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0u128) += v;
                }
                Ok(a)
            })?;
        let mut sorted = BTreeMap::new();
        for ((p, qy), c) in counts {
            sorted.insert((TypeVector::from_counts(p)?, TypeVector::from_counts(qy)?), BigUint::from(c));
        }
        let total = BigUint::from(domain) * BigUint::from(count);
        Ok(JointSpectrum::from_counts((q, n), (q, m), sorted, &total))
    }

    /// `E[S_𝒴(F(𝒳^n))]`, the expected spectrum of the image, exactly.
    pub fn expected_image_spectrum(&self, limits: &EnumLimits) -> Result<Spectrum> {
        self.validate()?;
        let count = self.realization_count();
        limits.check_realizations(count)?;
        limits.check_domain(self.q(), self.input_len())?;
        let count = count.expect("checked");
        let sum = (0..count)
            .into_par_iter()
            .map(|i| -> Result<BTreeMap<TypeVector, BigRational>> {
                let image = self.realization(i)?.image(limits)?;
                let size = big_int(image.len() as u64);
                let mut out: BTreeMap<TypeVector, BigRational> = BTreeMap::new();
                for y in &image {
                    *out.entry(TypeVector::of(self.q(), y)?).or_insert_with(BigRational::zero) += BigRational::one();
                }
                Ok(out.into_iter().map(|(k, v)| (k, v / &size)).collect())
            })
            .try_reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert_with(BigRational::zero) += v;
                }
                Ok(a)
            })?;
        let n = BigRational::from_integer(BigInt::from(count));
        Spectrum::from_entries(self.q(), self.output_len(), sum.into_iter().map(|(k, v)| (k, v / &n)))
    }

    /// `E[S_{𝒴|𝒳}(F)]`: the forward conditional of the expected joint spectrum.
    pub fn expected_conditional(&self, limits: &EnumLimits) -> Result<CondSpectrum> {
        Ok(self.expected_joint_spectrum(limits)?.forward_conditional())
    }
}

fn nonzero_digits(index: u128, q: u32, len: usize) -> Vec<u32> {
    digits(index, q - 1, len).into_iter().map(|a| a + 1).collect()
}

/// Counts of `(P_x, P_{f(x)})` over all inputs, as raw count vectors.
pub(crate) fn type_pair_counts<M: SeqMap + ?Sized>(f: &M) -> HashMap<(Vec<u32>, Vec<u32>), u128> {
    let mut y = vec![0u32; f.output_len()];
    let mut px = vec![0u32; f.input_alphabet() as usize];
    let mut py = vec![0u32; f.output_alphabet() as usize];
    let mut out: HashMap<(Vec<u32>, Vec<u32>), u128> = HashMap::new();
    for_each_sequence(f.input_alphabet(), f.input_len(), |x| {
        f.apply_into(x, &mut y);
        TypeVector::count_into(x, &mut px);
        TypeVector::count_into(&y, &mut py);
        *out.entry((px.clone(), py.clone())).or_insert(0) += 1;
    });
    out
}

/// Averages the exact joint spectra of `F ∘ σ ∘ G` over all interleavers
/// `σ`, for fixed codes. This is the brute-force side of the chain rule.
pub fn interleaved_composition_spectrum(
    outer: &LinearCodeMatrix,
    inner: &LinearCodeMatrix,
    limits: &EnumLimits,
) -> Result<JointSpectrum> {
    limits.check_permutations(outer.m())?;
    let kind = EnsembleKind::SerialConcat {
        outer: Box::new(EnsembleKind::Fixed { generator: outer.clone() }),
        inner: Box::new(EnsembleKind::Fixed { generator: inner.clone() }),
    };
    kind.expected_joint_spectrum(limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::big_ratio;
    use crate::spectrum::alpha_table;
    use std::collections::BTreeSet;

    fn limits() -> EnumLimits {
        EnumLimits::default()
    }

    #[test]
    fn lehmer_unranking_is_a_bijection() {
        let perms: BTreeSet<Vec<usize>> = (0..24).map(|i| permutation_from_index(4, i)).collect();
        assert_eq!(perms.len(), 24);
        assert_eq!(permutation_from_index(3, 0), vec![0, 1, 2]);
    }

    #[test]
    fn realization_enumeration_is_distinct() {
        let k = EnsembleKind::Rlc { q: 2, n: 2, m: 2 };
        assert_eq!(k.realization_count(), Some(16));
        let all: BTreeSet<Vec<Vec<u32>>> =
            (0..16).map(|i| k.realization(i).unwrap().generator().to_rows()).collect();
        assert_eq!(all.len(), 16);
        assert!(k.realization(16).is_err());

        let l = EnsembleKind::Ldgm { q: 3, n: 2, c: 2, d: 2 };
        assert_eq!(l.realization_count(), Some(24 * 16));
    }

    #[test]
    fn rlc_single_symbol_is_uniform_over_two_matrices() {
        let k = EnsembleKind::Rlc { q: 2, n: 1, m: 1 };
        let mats: Vec<_> = (0..2).map(|i| k.realization(i).unwrap().generator().to_rows()).collect();
        assert_eq!(mats, vec![vec![vec![0]], vec![vec![1]]]);
    }

    #[test]
    fn rlc_alpha_is_one_off_the_zero_type() {
        let e = EnsembleKind::Rlc { q: 2, n: 2, m: 2 }.expected_joint_spectrum(&limits()).unwrap();
        for ((p, _), a) in alpha_table(&e) {
            if !p.is_zero_type() {
                assert!(a.is_one());
            }
        }
    }

    #[test]
    fn validation() {
        assert!(EnsembleKind::Ldgm { q: 2, n: 3, c: 2, d: 4 }.validate().is_err());
        let bad = EnsembleKind::SerialConcat {
            outer: Box::new(EnsembleKind::Rlc { q: 2, n: 2, m: 3 }),
            inner: Box::new(EnsembleKind::Rlc { q: 2, n: 2, m: 1 }),
        };
        assert!(matches!(bad.validate(), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = EnsembleSpec::new(
            EnsembleKind::SerialConcat {
                outer: Box::new(EnsembleKind::RepParallel { q: 3, c: 2, n: 1 }),
                inner: Box::new(EnsembleKind::ChkParallel { q: 3, d: 2, m: 1 }),
            },
            9,
        )
        .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn deterministic_ensemble_expectation_is_its_spectrum() {
        let rep = rep_parallel(FieldSpec::new(3).unwrap(), 2, 2).unwrap();
        let e = EnsembleKind::Fixed { generator: rep.clone() }.expected_joint_spectrum(&limits()).unwrap();
        assert_eq!(e, JointSpectrum::of_map(&rep, &limits()).unwrap());
    }

    #[test]
    fn chk_pair_zero_output() {
        let e = EnsembleKind::Chk { q: 3, d: 2 }.expected_joint_spectrum(&limits()).unwrap();
        let p0 = TypeVector::zero(3, 2);
        let q0 = TypeVector::zero(3, 1);
        assert_eq!(e.get(&p0, &q0), big_ratio(1, 9));
    }
}
