//! Linear code constructors: explicit generators, repetition and check
//! layers, interleavers, serial concatenation, random linear codes and the
//! regular LDGM code `(⊙ CHK) ∘ Σ ∘ (⊙ REP)`.

use std::collections::BTreeSet;

use num_rational::{BigRational, Rational64};
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldMatrix, FieldSpec};
use crate::seq::{for_each_sequence, EnumLimits, SeqMap};

/// A linear code `F_q^n → F_q^m` given by its `m × n` generator, `x ↦ A·x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldMatrix", into = "FieldMatrix")]
pub struct LinearCodeMatrix {
    generator: FieldMatrix,
}

impl LinearCodeMatrix {
    pub fn new(generator: FieldMatrix) -> Result<Self> {
        if generator.rows() == 0 || generator.cols() == 0 {
            return Err(Error::invalid("a code needs at least one input and one output symbol"));
        }
        Ok(LinearCodeMatrix { generator })
    }

    pub fn identity(field: FieldSpec, n: usize) -> Result<Self> {
        Self::new(FieldMatrix::identity(field, n))
    }

    pub fn zero(field: FieldSpec, n: usize, m: usize) -> Result<Self> {
        Self::new(FieldMatrix::zeros(field, m, n))
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    pub fn field(&self) -> FieldSpec {
        self.generator.field()
    }

    pub fn q(&self) -> u32 {
        self.field().q()
    }

    /// Input length.
    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// Output length.
    pub fn m(&self) -> usize {
        self.generator.rows()
    }

    /// `R(f) = n/m`.
    pub fn rate(&self) -> Rational64 {
        Rational64::new(self.n() as i64, self.m() as i64)
    }

    pub fn encode(&self, x: &[u32]) -> Result<Vec<u32>> {
        self.apply(x)
    }

    pub fn rank(&self) -> usize {
        self.generator.rank()
    }

    /// The image `f(F_q^n)` by exhaustive enumeration.
    pub fn image(&self, limits: &EnumLimits) -> Result<BTreeSet<Vec<u32>>> {
        limits.check_domain(self.q(), self.n())?;
        let mut out = BTreeSet::new();
        let mut y = vec![0; self.m()];
        for_each_sequence(self.q(), self.n(), |x| {
            self.generator.mat_vec_into(x, &mut y);
            out.insert(y.clone());
        });
        Ok(out)
    }
}

impl TryFrom<FieldMatrix> for LinearCodeMatrix {
    type Error = Error;

    fn try_from(m: FieldMatrix) -> Result<Self> {
        LinearCodeMatrix::new(m)
    }
}

impl From<LinearCodeMatrix> for FieldMatrix {
    fn from(c: LinearCodeMatrix) -> FieldMatrix {
        c.generator
    }
}

impl SeqMap for LinearCodeMatrix {
    fn input_alphabet(&self) -> u32 {
        self.q()
    }
    fn input_len(&self) -> usize {
        self.n()
    }
    fn output_alphabet(&self) -> u32 {
        self.q()
    }
    fn output_len(&self) -> usize {
        self.m()
    }
    fn apply_into(&self, x: &[u32], out: &mut [u32]) {
        self.generator.mat_vec_into(x, out);
    }
}

/// A permutation of sequence positions: `σ(x)_i = x_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            match seen.get_mut(p) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::invalid(format!("{perm:?} is not a permutation"))),
            }
        }
        Ok(Interleaver { perm })
    }

    pub fn identity(n: usize) -> Self {
        Interleaver { perm: (0..n).collect() }
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Interleaver { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply<T: Copy>(&self, x: &[T]) -> Result<Vec<T>> {
        Error::check_dim(self.len(), x.len())?;
        Ok(self.perm.iter().map(|&p| x[p]).collect())
    }

    pub fn matrix(&self, field: FieldSpec) -> FieldMatrix {
        FieldMatrix::permutation(field, &self.perm)
    }
}

impl TryFrom<Vec<usize>> for Interleaver {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Interleaver::new(v)
    }
}

impl From<Interleaver> for Vec<usize> {
    fn from(i: Interleaver) -> Vec<usize> {
        i.perm
    }
}

/// Generator of `⊙_{i=1}^n f_c^REP`: each input symbol repeated `c` times,
/// in blocks. `F_q^n → F_q^{nc}`.
pub fn rep_parallel(field: FieldSpec, c: usize, n: usize) -> Result<LinearCodeMatrix> {
    if c == 0 || n == 0 {
        return Err(Error::invalid("repetition needs c >= 1 and n >= 1"));
    }
    let mut g = FieldMatrix::zeros(field, n * c, n);
    for j in 0..n {
        for k in 0..c {
            g.set(j * c + k, j, 1);
        }
    }
    LinearCodeMatrix::new(g)
}

/// Generator of `⊙_{i=1}^m F_d^CHK` for fixed coefficients: row `r` is
/// `Σ_k coeffs[r·d + k] · x_{r·d + k}`. `F_q^{md} → F_q^m`.
pub fn chk_parallel(field: FieldSpec, d: usize, coeffs: &[u32]) -> Result<LinearCodeMatrix> {
    if d == 0 || coeffs.is_empty() || coeffs.len() % d != 0 {
        return Err(Error::invalid(format!(
            "{} check coefficients do not split into rows of {d}",
            coeffs.len()
        )));
    }
    let m = coeffs.len() / d;
    let mut g = FieldMatrix::zeros(field, m, m * d);
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 || c >= field.q() {
            return Err(Error::invalid(format!("check coefficient {c} is not in F_q \\ {{0}}")));
        }
        g.set(i / d, i, c);
    }
    LinearCodeMatrix::new(g)
}

/// `d` i.i.d. coefficients uniform on `F_q \ {0}`.
pub fn sample_chk<R: Rng + ?Sized>(field: FieldSpec, d: usize, rng: &mut R) -> Vec<u32> {
    (0..d).map(|_| rng.random_range(1..field.q())).collect()
}

/// Uniform random `m × n` generator.
pub fn sample_rlc<R: Rng + ?Sized>(
    field: FieldSpec,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<LinearCodeMatrix> {
    let mut g = FieldMatrix::zeros(field, m, n);
    for r in 0..m {
        for c in 0..n {
            g.set(r, c, rng.random_range(0..field.q()));
        }
    }
    LinearCodeMatrix::new(g)
}

/// `inner ∘ σ ∘ outer` as a single generator.
pub fn serial_concat(
    outer: &LinearCodeMatrix,
    interleaver: &Interleaver,
    inner: &LinearCodeMatrix,
) -> Result<LinearCodeMatrix> {
    if outer.field() != inner.field() {
        return Err(Error::ShapeMismatch("outer and inner codes use different fields".into()));
    }
    Error::check_dim(outer.m(), interleaver.len())?;
    Error::check_dim(interleaver.len(), inner.n())?;
    let permuted = interleaver.matrix(outer.field()).mul(&outer.generator)?;
    LinearCodeMatrix::new(inner.generator.mul(&permuted)?)
}

/// Output-length for LDGM parameters, if `nc` is divisible by `d`.
pub fn ldgm_output_len(n: usize, c: usize, d: usize) -> Result<usize> {
    if n == 0 || c == 0 || d == 0 {
        return Err(Error::invalid("LDGM needs n, c, d >= 1"));
    }
    if (n * c) % d != 0 {
        return Err(Error::invalid(format!(
            "n·c = {} is not divisible by d = {d}, so m = n·c/d is not integral",
            n * c
        )));
    }
    Ok(n * c / d)
}

/// A sampled regular LDGM code together with the randomness that built it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdgmSample {
    pub code: LinearCodeMatrix,
    pub interleaver: Interleaver,
    pub coefficients: Vec<u32>,
    pub n: usize,
    pub c: usize,
    pub d: usize,
}

impl LdgmSample {
    /// Number of edges of the underlying bipartite graph, `n·c = m·d`. Entries
    /// of the generator may merge or cancel when two edges join the same pair.
    pub fn edge_count(&self) -> usize {
        self.coefficients.len()
    }
}

/// Builds `(⊙ CHK) ∘ σ ∘ (⊙ REP)` from an explicit interleaver and coefficients.
pub fn ldgm_from_parts(
    field: FieldSpec,
    n: usize,
    c: usize,
    d: usize,
    interleaver: &Interleaver,
    coefficients: &[u32],
) -> Result<LinearCodeMatrix> {
    let m = ldgm_output_len(n, c, d)?;
    Error::check_dim(m * d, coefficients.len())?;
    Error::check_dim(n * c, interleaver.len())?;
    // Edge j joins check j / d to input perm[j] / c; summing edges directly
    // matches the three-matrix product without forming it.
    let mut g = FieldMatrix::zeros(field, m, n);
    for (j, (&a, &p)) in coefficients.iter().zip(interleaver.perm()).enumerate() {
        if a == 0 || a >= field.q() {
            return Err(Error::invalid(format!("check coefficient {a} is not in F_q \\ {{0}}")));
        }
        let (r, col) = (j / d, p / c);
        g.set(r, col, field.add(g.get(r, col), a));
    }
    LinearCodeMatrix::new(g)
}

/// Samples a regular LDGM code: a uniform interleaver on `nc` letters followed
/// by `m` independent check rows.
pub fn sample_ldgm<R: Rng + ?Sized>(
    field: FieldSpec,
    n: usize,
    c: usize,
    d: usize,
    rng: &mut R,
) -> Result<LdgmSample> {
    let m = ldgm_output_len(n, c, d)?;
    let interleaver = Interleaver::uniform(n * c, rng);
    let coefficients = sample_chk(field, m * d, rng);
    let code = ldgm_from_parts(field, n, c, d, &interleaver, &coefficients)?;
    Ok(LdgmSample { code, interleaver, coefficients, n, c, d })
}

/// `Σ_m ∘ f ∘ Σ_n` with fresh uniform interleavers. Returns the code and the
/// (input, output) interleavers used.
pub fn randomize_code<R: Rng + ?Sized>(
    f: &LinearCodeMatrix,
    rng: &mut R,
) -> Result<(LinearCodeMatrix, Interleaver, Interleaver)> {
    let input = Interleaver::uniform(f.n(), rng);
    let output = Interleaver::uniform(f.m(), rng);
    let code = apply_interleavers(f, &input, &output)?;
    Ok((code, input, output))
}

/// `σ_out ∘ f ∘ σ_in` for given interleavers.
pub fn apply_interleavers(
    f: &LinearCodeMatrix,
    input: &Interleaver,
    output: &Interleaver,
) -> Result<LinearCodeMatrix> {
    Error::check_dim(f.n(), input.len())?;
    Error::check_dim(f.m(), output.len())?;
    let field = f.field();
    let g = output.matrix(field).mul(&f.generator)?.mul(&input.matrix(field))?;
    LinearCodeMatrix::new(g)
}

/// Result of [`outer_condition_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OuterCheck {
    pub holds: bool,
    /// First nonzero input (in enumeration order) whose codeword is too light.
    pub witness: Option<Vec<u32>>,
    /// Minimum Hamming weight over nonzero inputs; `None` when `n = 0`.
    pub min_weight: Option<usize>,
}

/// Checks that every nonzero input maps to a codeword whose type `P` has
/// `1 - P(0) > γ`, i.e. relative weight strictly above `γ`.
pub fn outer_condition_check(
    f: &LinearCodeMatrix,
    gamma: &BigRational,
    limits: &EnumLimits,
) -> Result<OuterCheck> {
    if gamma.is_negative() {
        return Err(Error::invalid("γ must be non-negative"));
    }
    limits.check_domain(f.q(), f.n())?;
    let m = f.m() as i64;
    let mut y = vec![0; f.m()];
    let mut witness = None;
    let mut min_weight: Option<usize> = None;
    for_each_sequence(f.q(), f.n(), |x| {
        if x.iter().all(|&a| a == 0) {
            return;
        }
        f.generator.mat_vec_into(x, &mut y);
        let w = y.iter().filter(|&&b| b != 0).count();
        min_weight = Some(min_weight.map_or(w, |prev| prev.min(w)));
        // w/m > γ  ⇔  w·den > num·m
        let heavy = BigRational::from_integer((w as i64).into()) > gamma * BigRational::from_integer(m.into());
        if !heavy && witness.is_none() {
            witness = Some(x.to_vec());
        }
    });
    Ok(OuterCheck { holds: witness.is_none(), witness, min_weight })
}

/// Output of [`good_generator_search`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodGenerator {
    /// `g = f ∘ T`.
    pub code: LinearCodeMatrix,
    /// The invertible `n × n` transform `T`.
    pub transform: FieldMatrix,
    /// Number of random `T` drawn, including the successful one.
    pub tries: usize,
}

/// Lower bound `1 - 1/q - 1/q²` on the chance a uniform square matrix is invertible.
pub fn full_rank_lower_bound(q: u32) -> f64 {
    let q = q as f64;
    1.0 - 1.0 / q - 1.0 / (q * q)
}

/// Re-parametrizes `f` through a uniformly random invertible transform:
/// draws `T` until `rank(T) = n` and returns `g = f ∘ T`, which has the same
/// image as `f`.
pub fn good_generator_search<R: Rng + ?Sized>(
    f: &LinearCodeMatrix,
    rng: &mut R,
    max_tries: usize,
) -> Result<GoodGenerator> {
    let n = f.n();
    for tries in 1..=max_tries {
        let t = sample_rlc(f.field(), n, n, rng)?;
        if t.rank() == n {
            let code = LinearCodeMatrix::new(f.generator.mul(t.generator())?)?;
            return Ok(GoodGenerator { code, transform: t.generator, tries });
        }
    }
    Err(Error::MaxTriesExhausted { tries: max_tries, bound: full_rank_lower_bound(f.q()) })
}
