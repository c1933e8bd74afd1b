use std::collections::BTreeMap;

use jointspec::analysis::delta::{ldgm_alpha_bound, ldgm_expected_joint, DEFAULT_TOL};
use jointspec::analysis::{concatenation_bound, jscc_goodness, max_normalized_ratio};
use jointspec::code::rep_parallel;
use jointspec::numeric::big_ratio;
use jointspec::seq::for_each_sequence;
use jointspec::{EnsembleKind, EnumLimits, Error, FieldSpec, LinearCodeMatrix, Spectrum, TypeVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn limits() -> EnumLimits {
    EnumLimits::default()
}

/// Calls `f` on every distinct arrangement of the multiset with the given
/// symbol counts.
fn arrangements(counts: &mut [u32], prefix: &mut Vec<u32>, len: usize, f: &mut impl FnMut(&[u32])) {
    if prefix.len() == len {
        f(prefix);
        return;
    }
    for a in 0..counts.len() {
        if counts[a] > 0 {
            counts[a] -= 1;
            prefix.push(a as u32);
            arrangements(counts, prefix, len, f);
            prefix.pop();
            counts[a] += 1;
        }
    }
}

/// For each output symbol, how many coefficient vectors in `{1..q-1}^d`
/// send `row` to it.
fn row_law(q: u32, row: &[u32]) -> Vec<u64> {
    let mut law = vec![0u64; q as usize];
    for_each_sequence(q - 1, row.len(), |a| {
        let s: u32 = a.iter().zip(row).map(|(&c, &z)| (c + 1) * z).sum::<u32>() % q;
        law[s as usize] += 1;
    });
    law
}

/// Exact `E[S(F^LD)(P, Q)]` with the interleaver averaged as a uniform
/// arrangement of the repeated input, independently of the closed form.
fn ldgm_by_arrangements(q: u32, n: usize, c: usize, d: usize) -> BTreeMap<(TypeVector, TypeVector), BigRational> {
    let m = n * c / d;
    let mut out = BTreeMap::new();
    for p in TypeVector::all(q, n) {
        let mut counts: Vec<u32> = p.scaled(c as u32).counts().to_vec();
        let mut hits: BTreeMap<TypeVector, u64> = BTreeMap::new();
        let mut total = 0u64;
        arrangements(&mut counts, &mut Vec::new(), n * c, &mut |z| {
            let laws: Vec<Vec<u64>> = z.chunks(d).map(|row| row_law(q, row)).collect();
            for_each_sequence(q, m, |y| {
                let w: u64 = y.iter().zip(&laws).map(|(&b, l)| l[b as usize]).product();
                if w > 0 {
                    *hits.entry(TypeVector::of(q, y).unwrap()).or_insert(0) += w;
                }
            });
            total += ((q - 1) as u64).pow((n * c) as u32);
        });
        let amb = Spectrum::ambient_value(&p);
        for (t, h) in hits {
            out.insert((p.clone(), t), big_ratio(h, total) * &amb);
        }
    }
    out
}

#[test]
fn ldgm_closed_form_matches_arrangement_oracle() {
    for (q, n, c, d) in [(3, 2, 2, 2), (3, 4, 3, 6), (5, 2, 2, 2), (2, 3, 2, 3)] {
        let closed = ldgm_expected_joint(q, n, c, d).unwrap();
        let oracle = ldgm_by_arrangements(q, n, c, d);
        let nonzero: BTreeMap<_, _> = oracle.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        assert_eq!(closed.entries(), &nonzero, "q={q} n={n} c={c} d={d}");
    }
}

#[test]
fn ldgm_closed_form_matches_full_enumeration() {
    let (q, n, c, d) = (3, 2, 2, 2);
    let exhaustive = EnsembleKind::Ldgm { q, n, c, d }.expected_joint_spectrum(&limits()).unwrap();
    assert_eq!(exhaustive, ldgm_expected_joint(q, n, c, d).unwrap());
}

#[test]
fn ldgm_bound_holds_for_every_pair() {
    for (q, n, c, d) in [(3, 2, 2, 2), (3, 4, 3, 6)] {
        let m = n * c / d;
        for p in TypeVector::all(q, n).into_iter().filter(|p| !p.is_zero_type()) {
            for t in TypeVector::all(q, m) {
                let r = ldgm_alpha_bound(q, n, c, d, &p, &t, DEFAULT_TOL).unwrap();
                assert!(r.satisfied, "q={q} n={n} c={c} d={d} P={p} Q={t}: {r:?}");
            }
        }
    }
}

#[test]
fn ldgm_bound_rejects_zero_input_type() {
    let p = TypeVector::zero(3, 2);
    let t = TypeVector::zero(3, 2);
    assert_eq!(ldgm_alpha_bound(3, 2, 2, 2, &p, &t, DEFAULT_TOL).unwrap_err(), Error::ZeroInput);
}

fn f(q: u32) -> FieldSpec {
    FieldSpec::new(q).unwrap()
}

fn fixed_then(outer: &LinearCodeMatrix, inner: EnsembleKind) -> EnsembleKind {
    EnsembleKind::SerialConcat {
        outer: Box::new(EnsembleKind::Fixed { generator: outer.clone() }),
        inner: Box::new(inner),
    }
}

#[test]
fn concatenation_with_rlc_inner_is_perfect() {
    let outer = rep_parallel(f(2), 3, 1).unwrap();
    let inner = EnsembleKind::Rlc { q: 2, n: 3, m: 2 }.expected_conditional(&limits()).unwrap();
    let b = concatenation_bound(&outer, &big_ratio(1, 2), &inner, &limits()).unwrap();
    assert!(b.composite_goodness.max_ratio.is_one());
    assert_eq!(b.composite_goodness.exponent, 0.0);
    assert!(b.report.satisfied);
}

#[test]
fn concatenation_bound_against_direct_composition() {
    let outer = rep_parallel(f(3), 3, 2).unwrap();
    let chk = EnsembleKind::ChkParallel { q: 3, d: 3, m: 2 };
    let inner = chk.expected_conditional(&limits()).unwrap();

    // Every nonzero codeword has relative weight exactly 1/2, so γ = 1/2 fails.
    match concatenation_bound(&outer, &big_ratio(1, 2), &inner, &limits()) {
        Err(Error::OuterConditionViolated { witness }) => assert_eq!(witness, vec![1, 0]),
        other => panic!("expected a violation, got {other:?}"),
    }

    let b = concatenation_bound(&outer, &big_ratio(1, 4), &inner, &limits()).unwrap();
    assert!(b.report.satisfied);
    assert!(b.composite_goodness.max_ratio <= b.inner_goodness.max_ratio);

    let direct = fixed_then(&outer, chk).expected_conditional(&limits()).unwrap();
    assert_eq!(b.composite, direct);
}

#[test]
fn concatenation_at_zero_gamma_is_plain_goodness() {
    let outer = rep_parallel(f(3), 2, 1).unwrap();
    let kind = EnsembleKind::ChkParallel { q: 3, d: 2, m: 1 };
    let inner = kind.expected_conditional(&limits()).unwrap();
    let b = concatenation_bound(&outer, &BigRational::zero(), &inner, &limits()).unwrap();
    let joint = fixed_then(&outer, kind).expected_joint_spectrum(&limits()).unwrap();
    let plain = jscc_goodness(&joint).unwrap();
    assert_eq!(b.composite_goodness.max_ratio, plain.max_ratio);
    let again = max_normalized_ratio(&joint.forward_conditional(), 1, |o| !o.is_zero_type()).unwrap();
    assert_eq!(again.max_ratio, plain.max_ratio);
}

#[test]
fn zero_pair_alpha_is_q_pow_m() {
    let e = EnsembleKind::ChkParallel { q: 3, d: 2, m: 2 }.expected_joint_spectrum(&limits()).unwrap();
    let alpha = jointspec::spectrum::alpha_table(&e);
    let key = (TypeVector::zero(3, 4), TypeVector::zero(3, 2));
    assert_eq!(alpha[&key], BigRational::from_integer(BigInt::from(9)));
}
