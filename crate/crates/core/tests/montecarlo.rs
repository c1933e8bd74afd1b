use jointspec::analysis::{rank_full_probability, ExpectedChkSpectrum};
use jointspec::montecarlo::{estimate_expected_spectrum, estimate_rank_rate, estimate_uniformity, InputMode};
use jointspec::numeric::to_f64;
use jointspec::{EnsembleKind, EnsembleSpec, EnumLimits, Error, FieldMatrix, FieldSpec, JointSpectrum, LinearCodeMatrix};

fn limits() -> EnumLimits {
    EnumLimits::default()
}

fn assert_spectrum_within(spec: &EnsembleSpec, exact: &JointSpectrum, trials: usize, k: f64) {
    let est = estimate_expected_spectrum(spec, trials, InputMode::Exhaustive, &limits()).unwrap();
    for ((p, t), v) in exact.entries() {
        let e = est.get(p, t).unwrap_or_else(|| panic!("({p}, {t}) never observed"));
        assert!(e.within(to_f64(v), k), "({p}, {t}): {} ± {} vs {}", e.mean, e.std_err, to_f64(v));
    }
    for e in &est.entries {
        assert!(exact.entries().contains_key(&(e.p.clone(), e.q.clone())), "spurious ({}, {})", e.p, e.q);
    }
    assert!((est.total_mean() - 1.0).abs() < 1e-9);
}

#[test]
fn rlc_spectrum_estimate() {
    let kind = EnsembleKind::Rlc { q: 2, n: 2, m: 2 };
    let exact = kind.expected_joint_spectrum(&limits()).unwrap();
    assert_spectrum_within(&EnsembleSpec::new(kind, 1).unwrap(), &exact, 10_000, 3.0);
}

#[test]
fn chk_spectrum_estimate() {
    let exact = ExpectedChkSpectrum::new(3, 2, 1).unwrap().table().unwrap();
    let spec = EnsembleSpec::new(EnsembleKind::ChkParallel { q: 3, d: 2, m: 1 }, 1).unwrap();
    assert_spectrum_within(&spec, &exact, 10_000, 3.0);
}

#[test]
fn fixed_code_has_zero_variance() {
    let g = FieldMatrix::from_rows(FieldSpec::new(3).unwrap(), &[vec![1, 2], vec![0, 1]]).unwrap();
    let code = LinearCodeMatrix::new(g).unwrap();
    let exact = JointSpectrum::of_map(&code, &limits()).unwrap();
    let spec = EnsembleSpec::new(EnsembleKind::Fixed { generator: code }, 3).unwrap();
    let est = estimate_expected_spectrum(&spec, 50, InputMode::Exhaustive, &limits()).unwrap();
    assert_eq!(est.entries.len(), exact.entries().len());
    for e in &est.entries {
        assert_eq!(e.estimate.std_err, 0.0);
        assert_eq!(e.estimate.mean, to_f64(&exact.get(&e.p, &e.q)));
    }
}

#[test]
fn sampled_inputs_are_unbiased() {
    let kind = EnsembleKind::Ldgm { q: 3, n: 4, c: 3, d: 6 };
    let exact = jointspec::analysis::delta::ldgm_expected_joint(3, 4, 3, 6).unwrap();
    let spec = EnsembleSpec::new(kind, 2).unwrap();
    let est = estimate_expected_spectrum(&spec, 20_000, InputMode::Sampled { per_trial: 4 }, &limits()).unwrap();
    for e in &est.entries {
        assert!(e.estimate.within(to_f64(&exact.get(&e.p, &e.q)), 4.0), "({}, {})", e.p, e.q);
    }
}

#[test]
fn rlc_outputs_are_uniform() {
    for (q, n, m, x) in [(2, 3, 2, vec![1, 0, 0]), (3, 2, 1, vec![1, 2])] {
        let spec = EnsembleSpec::new(EnsembleKind::Rlc { q, n, m }, 5).unwrap();
        let r = estimate_uniformity(&spec, &x, 100_000, &limits()).unwrap();
        let cells = (q as usize).pow(m as u32);
        assert_eq!(r.probabilities.len(), cells);
        assert_eq!(r.degrees_of_freedom, cells - 1);
        for e in &r.probabilities {
            assert!(e.within(1.0 / cells as f64, 3.0), "{}: {}", e.target, e.mean);
        }
    }
}

#[test]
fn zero_input_is_rejected() {
    let spec = EnsembleSpec::new(EnsembleKind::Rlc { q: 2, n: 3, m: 2 }, 0).unwrap();
    assert_eq!(estimate_uniformity(&spec, &[0, 0, 0], 100, &limits()).unwrap_err(), Error::ZeroInput);
}

#[test]
fn rank_rates() {
    let e = estimate_rank_rate(2, 2, 2, 100_000, 8).unwrap();
    assert!(e.within(to_f64(&rank_full_probability(2, 2, 2).unwrap()), 3.0));
    let big = estimate_rank_rate(2, 8, 8, 100_000, 8).unwrap();
    assert!(big.mean > 0.25 - 3.0 * big.std_err);
    assert_eq!(estimate_rank_rate(3, 4, 0, 10, 0).unwrap().mean, 1.0);
    assert!(estimate_rank_rate(2, 2, 3, 10, 0).is_err());
    assert!(estimate_rank_rate(2, 2, 2, 1, 0).is_err());
}

#[test]
fn estimates_depend_only_on_seed() {
    let spec = EnsembleSpec::new(EnsembleKind::Ldgm { q: 3, n: 2, c: 2, d: 2 }, 42).unwrap();
    let a = estimate_expected_spectrum(&spec, 500, InputMode::Exhaustive, &limits()).unwrap();
    let b = estimate_expected_spectrum(&spec, 500, InputMode::Exhaustive, &limits()).unwrap();
    assert_eq!(a, b);
    let other = EnsembleSpec::new(spec.kind.clone(), 43).unwrap();
    assert_ne!(a, estimate_expected_spectrum(&other, 500, InputMode::Exhaustive, &limits()).unwrap());
}
