use jointspec::analysis::chk::checksum_distribution;
use jointspec::analysis::delta::{delta_d, delta_objective, DEFAULT_TOL};
use jointspec::analysis::{rank_full_probability, rank_lower_bound};
use jointspec::code::{good_generator_search, sample_ldgm, sample_rlc, Interleaver};
use jointspec::numeric::big_ratio;
use jointspec::rng::stream_rng;
use jointspec::seq::SeqMap;
use jointspec::spectrum::kernel_spectrum;
use jointspec::{EnumLimits, FieldSpec, GenPoly, JointSpectrum, Spectrum, TypeVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

const PRIMES: [u32; 3] = [2, 3, 5];

fn limits() -> EnumLimits {
    EnumLimits::default()
}

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|q| FieldSpec::new(q).unwrap())
}

/// A random linear code, small enough to enumerate.
fn small_code() -> impl Strategy<Value = (FieldSpec, usize, usize, u64)> {
    (field(), 1usize..=4, 1usize..=4, any::<u64>()).prop_filter("domain", |(f, n, _, _)| f.q().pow(*n as u32) <= 625)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse(q in prop::sample::select(PRIMES.to_vec()), a in 1u32..5) {
        let f = FieldSpec::new(q).unwrap();
        prop_assume!(a < q);
        prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    #[test]
    fn encoding_is_linear((f, n, m, seed) in small_code(), s in any::<u64>()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let mut rng = stream_rng(s, 0);
        let x = sample_rlc(f, 1, n, &mut rng).unwrap().generator().to_rows().concat();
        let y = sample_rlc(f, 1, n, &mut rng).unwrap().generator().to_rows().concat();
        let lhs = code.encode(&f.add_vec(&x, &y).unwrap()).unwrap();
        let rhs = f.add_vec(&code.encode(&x).unwrap(), &code.encode(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn joint_spectrum_is_consistent((f, n, m, seed) in small_code()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let joint = JointSpectrum::of_map(&code, &limits()).unwrap();
        prop_assert!(joint.total().is_one());
        prop_assert_eq!(joint.marginal_x(), Spectrum::ambient(f.q(), n));
        let zero = (TypeVector::zero(f.q(), n), TypeVector::zero(f.q(), m));
        prop_assert_eq!(joint.get(&zero.0, &zero.1), Spectrum::ambient_value(&zero.0));
        // The image of a rank-r code has q^r points.
        let image = code.image(&limits()).unwrap();
        prop_assert_eq!(image.len() as u64, (f.q() as u64).pow(code.rank() as u32));
    }

    #[test]
    fn kernel_size_matches_rank((f, n, m, seed) in small_code()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let k = kernel_spectrum(&code, &limits()).unwrap();
        let size = (f.q() as u64).pow((n - code.rank()) as u32);
        prop_assert_eq!(k.get(&TypeVector::zero(f.q(), n)), big_ratio(1, size));
    }

    #[test]
    fn genfun_round_trip((f, n, m, seed) in small_code()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let joint = JointSpectrum::of_map(&code, &limits()).unwrap();
        let g = GenPoly::from_joint(&joint);
        prop_assert!(g.eval_at_ones().is_one());
        prop_assert_eq!(g.to_joint().unwrap(), joint.clone());
        let s = joint.marginal_y();
        prop_assert_eq!(GenPoly::from_spectrum(&s).to_spectrum().unwrap(), s);
    }

    #[test]
    fn conditionals_recompose((f, n, m, seed) in small_code()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let joint = JointSpectrum::of_map(&code, &limits()).unwrap();
        let fwd = joint.forward_conditional();
        let px = joint.marginal_x();
        for ((p, t), v) in joint.entries() {
            prop_assert_eq!(&(fwd.value(t, p).unwrap() * px.get(p)), v);
        }
    }

    #[test]
    fn checksum_law_is_a_distribution(q in prop::sample::select(PRIMES.to_vec()), d in 1usize..8) {
        let law = checksum_distribution(q, d).unwrap();
        let total: BigRational = law.iter().sum();
        prop_assert!(total.is_one());
        prop_assert!(law[1..].iter().all(|v| *v == law[1]));
        let r = BigRational::new(BigInt::from(-1), BigInt::from(q - 1));
        let pow = |k: usize| (0..k).fold(BigRational::one(), |acc, _| acc * &r);
        let qr = BigRational::from_integer(BigInt::from(q));
        prop_assert_eq!(&law[0], &((BigRational::one() - pow(d - 1)) / &qr));
    }

    #[test]
    fn rank_probability_is_bracketed(q in prop::sample::select(PRIMES.to_vec()), n in 1usize..10, m in 1usize..10) {
        prop_assume!(m <= n);
        let p = rank_full_probability(q, n, m).unwrap();
        prop_assert!(p <= BigRational::one() && p > BigRational::zero());
        for k in 1..=m {
            prop_assert!(p > rank_lower_bound(q, n, m, k).unwrap());
        }
    }

    #[test]
    fn delta_value_is_a_certificate(
        q in prop::sample::select(PRIMES.to_vec()),
        d in 1usize..10,
        x in 0.0f64..=1.0,
        y in 0.0f64..=1.0,
        probes in prop::collection::vec(0.0001f64..0.9999, 20),
    ) {
        let r = delta_d(q, d, x, y, DEFAULT_TOL).unwrap();
        for xh in probes.into_iter().chain([x]) {
            if xh > 0.0 && xh < 1.0 {
                let v = delta_objective(q, d, x, y, xh);
                prop_assert!(r.value <= v + 1e-9, "δ={} objective({xh})={v}", r.value);
            }
        }
        if (x - 1.0 / q as f64).abs() < 1e-15 {
            prop_assert!(r.value <= 1e-12);
        }
    }

    #[test]
    fn good_generator_keeps_image((f, n, m, seed) in small_code()) {
        let code = sample_rlc(f, n, m, &mut stream_rng(seed, 0)).unwrap();
        let g = good_generator_search(&code, &mut stream_rng(seed, 1), 10_000).unwrap();
        prop_assert_eq!(g.transform.rank(), n);
        prop_assert_eq!(g.code.image(&limits()).unwrap(), code.image(&limits()).unwrap());
    }

    #[test]
    fn interleaver_matrix_agrees_with_apply(n in 1usize..10, seed in any::<u64>()) {
        let f = FieldSpec::new(5).unwrap();
        let pi = Interleaver::uniform(n, &mut stream_rng(seed, 0));
        let x: Vec<u32> = (0..n as u32).map(|i| i % 5).collect();
        prop_assert_eq!(pi.matrix(f).mat_vec(&x).unwrap(), pi.apply(&x).unwrap());
    }

    #[test]
    fn ldgm_is_regular(n in 1usize..8, c in 1usize..4, d in 1usize..4, seed in any::<u64>()) {
        prop_assume!((n * c) % d == 0);
        let s = sample_ldgm(FieldSpec::new(3).unwrap(), n, c, d, &mut stream_rng(seed, 0)).unwrap();
        prop_assert_eq!(s.code.m(), n * c / d);
        prop_assert_eq!(s.code.n(), n);
        prop_assert_eq!(s.edge_count(), n * c);
        prop_assert!(s.code.generator().row_weights().iter().all(|&w| w <= d));
        prop_assert!(s.code.generator().col_weights().iter().all(|&w| w <= c));
        prop_assert!(s.coefficients.iter().all(|&a| a == 1 || a == 2));
        prop_assert_eq!(s.code.input_len(), n);
    }
}
