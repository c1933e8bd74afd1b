//! A quick self-check: each invariant is recomputed on small instances
//! against an independent brute-force evaluation.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::analysis::chk::{checksum_distribution, full_support_grid, ExpectedChkSpectrum};
use crate::analysis::delta::{delta_d, delta_objective, DEFAULT_TOL};
use crate::analysis::rank::{rank_full_probability, rank_lower_bound};
use crate::code::{rep_parallel, sample_rlc, LinearCodeMatrix};
use crate::ensemble::{interleaved_composition_spectrum, EnsembleKind};
use crate::error::Result;
use crate::field::{FieldMatrix, FieldSpec};
use crate::numeric::big_ratio;
use crate::rng::stream_rng;
use crate::seq::{for_each_sequence, EnumLimits};
use crate::spectrum::{alpha_table, CondSpectrum, JointSpectrum, Spectrum};
use crate::types::TypeVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<Option<String>>) -> CheckOutcome {
    match r {
        Ok(None) => CheckOutcome { name, passed: true, detail: "ok".into() },
        Ok(Some(why)) => CheckOutcome { name, passed: false, detail: why },
        Err(e) => CheckOutcome { name, passed: false, detail: format!("error: {e}") },
    }
}

fn all_sequences(q: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_sequence(q, n, |x| out.push(x.to_vec()));
    out
}

fn ambient_formula() -> Result<Option<String>> {
    for q in [2, 3] {
        for n in 1..=4 {
            if Spectrum::of_set(q, &all_sequences(q, n))? != Spectrum::ambient(q, n) {
                return Ok(Some(format!("q={q} n={n}")));
            }
        }
    }
    Ok(None)
}

fn repetition_diagonal(limits: &EnumLimits) -> Result<Option<String>> {
    for q in [2, 3] {
        let field = FieldSpec::new(q)?;
        for n in 1..=2 {
            for c in 1..=3 {
                let cond = JointSpectrum::of_map(&rep_parallel(field, c, n)?, limits)?.forward_conditional();
                if cond != CondSpectrum::diagonal(q, n, n * c)? {
                    return Ok(Some(format!("q={q} n={n} c={c}")));
                }
            }
        }
    }
    Ok(None)
}

fn checksum_law() -> Result<Option<String>> {
    for q in [2u32, 3, 5] {
        for d in 1..=3 {
            let mut counts = vec![0u64; q as usize];
            let mut total = 0u64;
            for_each_sequence(q - 1, d, |c| {
                let s: u32 = c.iter().map(|&a| a + 1).sum::<u32>() % q;
                counts[s as usize] += 1;
                total += 1;
            });
            let brute: Vec<BigRational> = counts.iter().map(|&k| big_ratio(k, total)).collect();
            if checksum_distribution(q, d)? != brute {
                return Ok(Some(format!("q={q} d={d}")));
            }
        }
    }
    Ok(None)
}

fn expected_chk(limits: &EnumLimits) -> Result<Option<String>> {
    for (q, d, m) in [(3, 2, 1), (2, 2, 2), (3, 2, 2)] {
        let closed = ExpectedChkSpectrum::new(q, d, m)?.table()?;
        let brute = EnsembleKind::ChkParallel { q, d, m }.expected_joint_spectrum(limits)?;
        if closed != brute {
            return Ok(Some(format!("q={q} d={d} m={m}")));
        }
    }
    Ok(None)
}

fn g2_domination() -> Result<Option<String>> {
    let (q, d, m) = (3, 2, 1);
    let s = ExpectedChkSpectrum::new(q, d, m)?;
    for o in full_support_grid(q, 8) {
        for p in TypeVector::all(q, m * d) {
            for t in TypeVector::all(q, m) {
                if s.value(&p, &t)? > s.g2(&o, &p, &t)? {
                    return Ok(Some(format!("P={p} Q={t}")));
                }
            }
        }
    }
    Ok(None)
}

fn rank_law() -> Result<Option<String>> {
    let field = FieldSpec::new(2)?;
    for n in 1..=3 {
        for m in 1..=n {
            let mut full = 0u64;
            let mut total = 0u64;
            for_each_sequence(2, n * m, |e| {
                let rows: Vec<Vec<u32>> = e.chunks(n).map(<[u32]>::to_vec).collect();
                let a = FieldMatrix::from_rows(field, &rows).expect("shape is consistent");
                full += (a.rank() == m) as u64;
                total += 1;
            });
            if rank_full_probability(2, n, m)? != big_ratio(full, total) {
                return Ok(Some(format!("n={n} m={m}")));
            }
        }
    }
    for q in [2, 3, 5] {
        for n in 1..=8 {
            for m in 1..=n {
                let p = rank_full_probability(q, n, m)?;
                for k in 1..=m {
                    if p <= rank_lower_bound(q, n, m, k)? {
                        return Ok(Some(format!("lower bound q={q} n={n} m={m} k={k}")));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn rlc_perfection(limits: &EnumLimits) -> Result<Option<String>> {
    for (q, n) in [(2, 2), (3, 2)] {
        let e = EnsembleKind::Rlc { q, n, m: n }.expected_joint_spectrum(limits)?;
        if alpha_table(&e).iter().any(|((p, _), a)| !p.is_zero_type() && !a.is_one()) {
            return Ok(Some(format!("q={q} n={n}")));
        }
    }
    Ok(None)
}

fn chain_rule(limits: &EnumLimits) -> Result<Option<String>> {
    let field = FieldSpec::new(2)?;
    let mut rng = stream_rng(0x5eed, 0);
    for trial in 0..3 {
        let outer = sample_rlc(field, 2, 4, &mut rng)?;
        let inner = sample_rlc(field, 4, 3, &mut rng)?;
        let outer_cond = JointSpectrum::of_map(&outer, limits)?.forward_conditional();
        let inner_cond = JointSpectrum::of_map(&inner, limits)?.forward_conditional();
        let predicted = outer_cond.compose(&inner_cond)?;
        let brute = interleaved_composition_spectrum(&outer, &inner, limits)?.forward_conditional();
        if predicted != brute {
            return Ok(Some(format!("trial {trial}")));
        }
    }
    Ok(None)
}

fn ldgm_proof_step(limits: &EnumLimits) -> Result<Option<String>> {
    let (q, n, c, d) = (3, 2, 2, 2);
    let m = n * c / d;
    let ens = EnsembleKind::Ldgm { q, n, c, d }.expected_conditional(limits)?;
    let chk = ExpectedChkSpectrum::new(q, d, m)?;
    for p in TypeVector::all(q, n) {
        for t in TypeVector::all(q, m) {
            if ens.value(&t, &p)? != chk.conditional(&p.scaled(c as u32), &t)? {
                return Ok(Some(format!("P={p} Q={t}")));
            }
        }
    }
    Ok(None)
}

fn delta_certificate() -> Result<Option<String>> {
    let mut rng = stream_rng(0xde17a, 0);
    for d in [2, 4, 8] {
        for y in [0.0, 0.5, 1.0] {
            if delta_d(3, d, 1.0 / 3.0, y, DEFAULT_TOL)?.value > 1e-12 {
                return Ok(Some(format!("δ_{d}(1/3, {y}) > 0")));
            }
        }
        let r = delta_d(3, d, 0.4, 0.2, DEFAULT_TOL)?;
        for _ in 0..200 {
            let xh: f64 = rng.random_range(1e-6..1.0 - 1e-6);
            if r.value > delta_objective(3, d, 0.4, 0.2, xh) + 1e-12 {
                return Ok(Some(format!("d={d} probe {xh}")));
            }
        }
    }
    Ok(None)
}

fn linearity() -> Result<Option<String>> {
    let mut rng = stream_rng(0x11ea, 0);
    for q in [2, 3, 5] {
        let field = FieldSpec::new(q)?;
        let codes: Vec<LinearCodeMatrix> = vec![
            sample_rlc(field, 4, 3, &mut rng)?,
            rep_parallel(field, 3, 2)?,
            EnsembleKind::Ldgm { q, n: 4, c: 3, d: 2 }.sample(&mut rng)?,
        ];
        for f in &codes {
            for _ in 0..20 {
                let x: Vec<u32> = (0..f.n()).map(|_| rng.random_range(0..q)).collect();
                let y: Vec<u32> = (0..f.n()).map(|_| rng.random_range(0..q)).collect();
                let lhs = f.encode(&field.add_vec(&x, &y)?)?;
                let rhs = field.add_vec(&f.encode(&x)?, &f.encode(&y)?)?;
                if lhs != rhs {
                    return Ok(Some(format!("q={q} x={x:?} y={y:?}")));
                }
            }
        }
    }
    Ok(None)
}

fn normalization(limits: &EnumLimits) -> Result<Option<String>> {
    let e = EnsembleKind::Ldgm { q: 3, n: 2, c: 2, d: 2 }.expected_joint_spectrum(limits)?;
    if !e.total().is_one() || e.entries().values().any(|v| v < &BigRational::zero()) {
        return Ok(Some("LDGM expected spectrum is not a distribution".into()));
    }
    Ok(None)
}

/// Runs every invariant check and reports each by name.
pub fn run_all(limits: &EnumLimits) -> Vec<CheckOutcome> {
    vec![
        outcome("ambient_formula", ambient_formula()),
        outcome("repetition_diagonal", repetition_diagonal(limits)),
        outcome("checksum_law", checksum_law()),
        outcome("expected_chk_spectrum", expected_chk(limits)),
        outcome("g2_domination", g2_domination()),
        outcome("rank_law", rank_law()),
        outcome("rlc_alpha_one", rlc_perfection(limits)),
        outcome("chain_rule", chain_rule(limits)),
        outcome("ldgm_check_layer", ldgm_proof_step(limits)),
        outcome("delta_certificate", delta_certificate()),
        outcome("linearity", linearity()),
        outcome("normalization", normalization(limits)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        for o in run_all(&EnumLimits::default()) {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
