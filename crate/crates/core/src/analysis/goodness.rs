//! Finite-size goodness functionals and the serial-concatenation bound.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::report::{BoundReport, BoundValue};
use crate::code::{outer_condition_check, LinearCodeMatrix};
use crate::error::{Error, Result};
use crate::numeric::{ln_rational, serde_rational};
use crate::seq::EnumLimits;
use crate::spectrum::{alpha_table, CondSpectrum, JointSpectrum, Spectrum};
use crate::types::TypeVector;

/// A maximized normalized log-ratio and where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goodness {
    /// `(1/len)·ln(max_ratio)`; `−∞` when every admissible ratio is zero.
    pub exponent: f64,
    #[serde(with = "serde_rational")]
    pub max_ratio: BigRational,
    pub argmax: Vec<TypeVector>,
}

fn exponent(ratio: &BigRational, len: usize) -> f64 {
    ln_rational(ratio) / len as f64
}

/// `max_{P ≠ P₀, Q} (1/n) ln α(P, Q)` of an expected joint spectrum.
pub fn jscc_goodness(expected: &JointSpectrum) -> Result<Goodness> {
    let (_, n) = expected.input_shape();
    let mut best: Option<(BigRational, Vec<TypeVector>)> = None;
    for ((p, q), a) in alpha_table(expected) {
        if p.is_zero_type() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| a > *b) {
            best = Some((a, vec![p, q]));
        }
    }
    let (max_ratio, argmax) = best.ok_or(Error::EmptySupport)?;
    Ok(Goodness { exponent: exponent(&max_ratio, n), max_ratio, argmax })
}

/// `max_{Q ≠ Q₀} (1/m) ln(E[S(F(𝒳^n))](Q) / S(𝒴^m)(Q))` of an expected image spectrum.
pub fn image_goodness(expected_image: &Spectrum) -> Result<Goodness> {
    let (q, m) = (expected_image.q(), expected_image.n());
    let mut best: Option<(BigRational, Vec<TypeVector>)> = None;
    for t in TypeVector::all(q, m) {
        if t.is_zero_type() {
            continue;
        }
        let r = expected_image.get(&t) / Spectrum::ambient_value(&t);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, vec![t]));
        }
    }
    let (max_ratio, argmax) = best.ok_or(Error::EmptySupport)?;
    Ok(Goodness { exponent: exponent(&max_ratio, m), max_ratio, argmax })
}

/// Outcome of [`concatenation_bound`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposeBound {
    /// `E[S(G∘Σ∘F)(Q|O)]` obtained by the chain rule.
    pub composite: CondSpectrum,
    /// `max_{O≠0, Q} (1/n) ln(composite(Q|O) / S(𝒴^l)(Q))`.
    pub composite_goodness: Goodness,
    /// `max_{P ∈ A(γ), Q} (1/n) ln(inner(Q|P) / S(𝒴^l)(Q))`.
    pub inner_goodness: Goodness,
    pub report: BoundReport,
}

/// Evaluates the serial-concatenation bound for a fixed outer code `F` with
/// `F(𝒳^n \ {0}) ⊆ ∪_{P ∈ A(γ)} T_P`, `A(γ) = {P : 1 − P(0) > γ}`, and an
/// expected inner conditional spectrum `E[S(G)(Q|P)]`.
///
/// The composite conditional is the chain-rule sum over `P`; since only
/// `P ∈ A(γ)` carry weight for nonzero `O`, its normalized ratio is at most
/// the largest inner ratio over `A(γ)`. Both sides are compared exactly.
pub fn concatenation_bound(
    outer: &LinearCodeMatrix,
    gamma: &BigRational,
    inner: &CondSpectrum,
    limits: &EnumLimits,
) -> Result<ComposeBound> {
    let check = outer_condition_check(outer, gamma, limits)?;
    if let Some(witness) = check.witness {
        return Err(Error::OuterConditionViolated { witness });
    }
    if inner.given_shape() != (outer.q(), outer.m()) {
        return Err(Error::ShapeMismatch(format!(
            "inner conditional is given types of length {}, outer emits length {}",
            inner.given_shape().1,
            outer.m()
        )));
    }
    let n = outer.n();
    let outer_cond = JointSpectrum::of_map(outer, limits)?.forward_conditional();
    let composite = outer_cond.compose(inner)?;
    let composite_goodness = max_normalized_ratio(&composite, n, |o| !o.is_zero_type())?;
    let in_a = |p: &TypeVector| {
        let w = BigRational::from_integer((p.weight() as i64).into());
        let len = BigRational::from_integer((p.n() as i64).into());
        w > gamma * len
    };
    let inner_goodness = max_normalized_ratio(inner, n, in_a)?;
    let report = BoundReport::new(
        format!("serial concatenation n={n} gamma={gamma}"),
        BoundValue::Exact(composite_goodness.max_ratio.clone()),
        BoundValue::Exact(inner_goodness.max_ratio.clone()),
    );
    Ok(ComposeBound { composite, composite_goodness, inner_goodness, report })
}

/// `max (1/len) ln(cond(Q|P) / S(𝒴^l)(Q))` over conditioning types accepted by `keep`.
pub fn max_normalized_ratio(
    cond: &CondSpectrum,
    len: usize,
    keep: impl Fn(&TypeVector) -> bool,
) -> Result<Goodness> {
    let (qt, l) = cond.target_shape();
    let targets = TypeVector::all(qt, l);
    let mut best: Option<(BigRational, Vec<TypeVector>)> = None;
    for (p, slice) in cond.slices() {
        if !keep(p) {
            continue;
        }
        for t in &targets {
            let r = slice.get(t) / Spectrum::ambient_value(t);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, vec![p.clone(), t.clone()]));
            }
        }
    }
    let (max_ratio, argmax) = best.ok_or(Error::EmptySupport)?;
    Ok(Goodness { exponent: exponent(&max_ratio, len), max_ratio, argmax })
}
