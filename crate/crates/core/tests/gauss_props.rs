use std::f64::consts::{E, PI};

use loopax::exact::{rat, rational_point, QI};
use loopax::gauss_field::{
    correlator_exp_closed, correlator_exp_k_plus_sign, correlator_exp_mc, draw_field, gaussian_shift, heisenberg_tail_bound,
    heisenberg_two_point, heisenberg_two_point_truncated, kernel, sample_field, shift_identity_check, vacuum_expectation, Algebra,
    BasisMonomial, ExactFock, FockOrientation, FockParams, ModeSpace, Op, WeightSequence,
};
use loopax::mc;
use num_complex::Complex;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn covariance_estimate(w: &WeightSequence<f64>, u: f64, v: f64, n: u64, seed: u64) -> mc::McEstimate<f64> {
    mc::estimate(n, seed, |rng, _| {
        let f = draw_field(w, rng);
        // The K angle is not Gaussian; its covariance statement concerns the oscillating part.
        let offset = if f.algebra == Algebra::K { f.zero_mode } else { 0.0 };
        Complex::new((f.value(u) - offset) * (f.value(v) - offset), 0.0)
    })
    .unwrap()
}

#[test]
fn sampled_covariance_matches_kernel() {
    let profiles = [
        WeightSequence::inverse_square(Algebra::K, None, 12).unwrap(),
        WeightSequence::inverse_square(Algebra::A, Some(0.5), 12).unwrap(),
        WeightSequence::geometric(Algebra::A, Some(0.2), 0.5, 10).unwrap(),
    ];
    for (k, w) in profiles.iter().enumerate() {
        let est = covariance_estimate(w, 0.0, PI, 100_000, 11 + k as u64);
        let want = kernel(w, 0.0, PI);
        assert!(est.within_sigmas(Complex::new(want, 0.0), 3.0), "profile {k}: z = {}", est.z_score(Complex::new(want, 0.0)));
    }
}

#[test]
fn sampled_field_is_centred() {
    let w = WeightSequence::inverse_square(Algebra::A, Some(0.5), 8).unwrap();
    let est = mc::estimate(100_000, 5, |rng, _| Complex::new(draw_field(&w, rng).value(0.7), 0.0)).unwrap();
    assert!(est.within_sigmas(Complex::zero(), 3.0));
}

#[test]
fn correlators_match_monte_carlo_for_small_charge_sets() {
    let k = WeightSequence::geometric(Algebra::K, None, 0.5, 8).unwrap();
    let a = WeightSequence::geometric(Algebra::A, Some(0.1), 0.25, 8).unwrap();
    let angles = [0.3, 2.0, 4.1, 5.5];
    for w in [&k, &a] {
        for n in 0..=2usize {
            for m in 0..=2usize {
                if n + m == 0 {
                    continue;
                }
                let plus = &angles[..n];
                let minus = &angles[n..n + m];
                let closed = correlator_exp_closed(plus, minus, w);
                let est = correlator_exp_mc(plus, minus, w, 100_000, 100 + (n * 3 + m) as u64).unwrap();
                assert!(est.within_sigmas(Complex::new(closed, 0.0), 3.0), "{:?} ({n}, {m}): mc {} closed {closed}", w.algebra, est.mean);
                if w.algebra == Algebra::K && n != m {
                    assert_eq!(closed, 0.0);
                }
            }
        }
    }
}

#[test]
fn coincident_k_pair_rules_out_positive_zero_point_term() {
    // ⟨α⁺(u)α⁻(u)⟩ = 1 pointwise, which the +N_K(0,0) variant contradicts.
    let k: WeightSequence<f64> = WeightSequence::geometric(Algebra::K, None, 0.5, 8).unwrap();
    assert!((correlator_exp_closed(&[1.0], &[1.0], &k) - 1.0).abs() < 1e-14);
    let plus_sign = correlator_exp_k_plus_sign(&[1.0], &[1.0], &k);
    assert!((plus_sign - (2.0 * kernel(&k, 0.0, 0.0)).exp()).abs() < 1e-12);
}

#[test]
fn gaussian_shift_closed_form_and_translation_identity() {
    assert_eq!(gaussian_shift(&[0.0, 0.0], &[1.0, 3.0]).unwrap(), 1.0);
    assert!((gaussian_shift(&[1.0], &[2.0]).unwrap() - E).abs() < 1e-15);
    let f = |x: &[f64]| (0.5 * x[0] - x[1] + 0.25 * x[2]).powi(2);
    let est = shift_identity_check(f, &[0.0, 0.8, 0.0], &[1.0, 0.5, 0.25], 100_000, 21).unwrap();
    assert!(est.within_sigmas(Complex::zero(), 3.0), "z = {}", est.z_score(Complex::zero()));
}

#[test]
fn heisenberg_two_point_matches_geometric_series() {
    let params = FockParams::new(1.0, 0.0).unwrap();
    let z = Complex::new(0.5f64.sqrt(), 0.0);
    let oracle: f64 = (1..200).map(|n| 2.0 * n as f64 * 0.5f64.powi(n)).sum();
    let v = heisenberg_two_point(z, z, params).unwrap();
    assert!((v.re - oracle).abs() < 1e-12 && (v.re - 4.0).abs() < 1e-12);
    let off = FockParams { kappa: 0.0, p: 1.5 };
    let w = Complex::from_polar(0.7, 1.2);
    assert!((heisenberg_two_point(w, w * 0.9, off).unwrap() - Complex::new(2.25, 0.0)).norm() < 1e-15);
}

#[test]
fn heisenberg_truncation_respects_tail_bound() {
    let params = FockParams::new(0.8, -0.3).unwrap();
    let (z1, z2) = (Complex::from_polar(0.9, 0.4), Complex::from_polar(0.95, 2.0));
    let abs_w = (z1.conj() * z2).norm();
    let closed = heisenberg_two_point(z1, z2, params).unwrap();
    for modes in [5, 20, 80] {
        let truncated = heisenberg_two_point_truncated(z1, z2, params, modes).unwrap();
        let bound = heisenberg_tail_bound(abs_w, params.kappa, modes);
        assert!((closed - truncated).norm() <= bound * (1.0 + 1e-12), "M = {modes}");
    }
}

#[test]
fn normal_ordering_matches_closed_form_for_three_exponentials() {
    let space = ModeSpace::new(Algebra::A, Some(rat(1, 4)), vec![rat(1, 2), rat(1, 8), rat(1, 16)]).unwrap();
    let w = WeightSequence::new(Algebra::A, Some(0.25), vec![0.5, 0.125, 0.0625]).unwrap();
    let fock = ExactFock { kappa: QI::one(), p: QI::zero(), orientation: FockOrientation::Standard };
    let triples = [(3, 4, 5), (-5, 12, 13), (8, -15, 17)];
    let points: Vec<QI> = triples.iter().map(|&(a, b, c)| rational_point(rat(1, 1), a, b, c).unwrap()).collect();
    let angles: Vec<f64> = triples.iter().map(|&(a, b, _)| (b as f64).atan2(a as f64)).collect();
    let word: Vec<Op> =
        [1i8, 1, -1].iter().zip(&points).map(|(&s, z)| Op::Mult(BasisMonomial::exponential(space.exponential_at(s, z)))).collect();
    let exact = vacuum_expectation(&space, &fock, &word).unwrap().to_f64();
    let closed = correlator_exp_closed(&angles[..2], &angles[2..], &w);
    assert!((exact.re - closed).abs() < 1e-12 * closed && exact.im.abs() < 1e-12 * closed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_and_translation_invariant(u in -7.0..7.0f64, v in -7.0..7.0f64, s in -3.0..3.0f64) {
        let w = WeightSequence::inverse_square(Algebra::A, Some(0.3), 9).unwrap();
        prop_assert!((kernel(&w, u, v) - kernel(&w, v, u)).abs() < 1e-13);
        prop_assert!((kernel(&w, u + s, v + s) - kernel(&w, u, v)).abs() < 1e-12);
    }

    #[test]
    fn sampled_fields_are_real_and_k_exponentials_unimodular(seed in 0u64..1000, u in 0.0..6.3f64) {
        let w = WeightSequence::geometric(Algebra::K, None, 0.6, 6).unwrap();
        let f = sample_field(&w, seed);
        let (plus, minus) = (f.exponential(1, u), f.exponential(-1, u));
        prop_assert!((plus * minus - Complex::new(1.0, 0.0)).norm() < 1e-13);
        prop_assert!((plus.norm() - 1.0).abs() < 1e-13);
    }
}
