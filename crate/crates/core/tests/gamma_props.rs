use std::f64::consts::{PI, TAU};

use loopax::gamma_suite::{
    gamma_classical, gamma_reg, gamma_reg_functional_residual, gamma_reg_limit_check, gamma_reg_with, loop_gamma_estimate,
    loop_gamma_functional_eq_residual, GammaRegParams, LimitVerdict, LoopGammaInput, RegScheme,
};
use loopax::smooth::{ComplexTrig, Smooth, TrigPoly};
use loopax::wiener::Grid;
use num_complex::Complex;
use proptest::prelude::*;

fn c(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn classical_spot_values() {
    assert!(rel(gamma_classical(c(1.0)).unwrap(), c(1.0)) < 1e-12);
    assert!(rel(gamma_classical(c(5.0)).unwrap(), c(24.0)) < 1e-10);
    assert!(rel(gamma_classical(c(0.5)).unwrap(), c(PI.sqrt())) < 1e-10);
    assert!(gamma_classical(c(0.0)).is_err());
    assert!(gamma_classical(Complex::new(-0.5, 1.0)).is_err());
}

#[test]
fn classical_matches_reference_on_real_axis() {
    for k in 1..=100 {
        let x = 0.1 * k as f64;
        let got = gamma_classical(c(x)).unwrap();
        let want = statrs::function::gamma::gamma(x);
        assert!((got.re - want).abs() <= 1e-10 * want.abs(), "x = {x}: {got} vs {want}");
        assert!(got.im.abs() < 1e-14);
    }
}

#[test]
fn classical_recurrence_on_complex_grid() {
    for re in [0.1, 0.7, 1.5, 3.0, 6.0] {
        for im in [-2.0, 0.0, 0.5, 3.0] {
            let z = Complex::new(re, im);
            let lhs = gamma_classical(z + 1.0).unwrap();
            let rhs = z * gamma_classical(z).unwrap();
            assert!(rel(lhs, rhs) < 1e-9, "z = {z}");
        }
    }
}

#[test]
fn regularized_tends_to_gaussian_integral_as_mu_vanishes() {
    for t in [0.5, 1.0, 2.0] {
        let v = gamma_reg(GammaRegParams::new(1e-12, t).unwrap(), c(0.0)).unwrap();
        assert!(rel(v, c((TAU * t).sqrt())) < 1e-8, "t = {t}: {v}");
    }
}

#[test]
fn regularized_functional_equation_spot() {
    let params = GammaRegParams::new(1.0, 1.0).unwrap();
    let r = gamma_reg_functional_residual(params, c(0.7), 1e-4).unwrap();
    assert!(r.norm() <= 1e-6, "{r}");
}

#[test]
fn regularized_two_schemes_agree() {
    let params = GammaRegParams::new(1.0, 1.0).unwrap();
    let a = gamma_reg_with(params, c(0.0), RegScheme::Adaptive).unwrap();
    let b = gamma_reg_with(params, c(0.0), RegScheme::Simpson(4000)).unwrap();
    assert!(rel(a, b) < 1e-8, "{a} vs {b}");
}

#[test]
fn regularized_mean_value_property() {
    let params = GammaRegParams::new(0.8, 1.3).unwrap();
    let center = Complex::new(0.4, 0.2);
    let m = 64;
    let mean = (0..m).fold(c(0.0), |acc, k| {
        let theta = TAU * k as f64 / m as f64;
        acc + gamma_reg(params, center + Complex::from_polar(0.3, theta)).unwrap()
    }) / m as f64;
    let value = gamma_reg(params, center).unwrap();
    assert!(rel(mean, value) < 1e-8, "{mean} vs {value}");
}

#[test]
fn limit_converges_to_oracle_not_to_claim() {
    let report = gamma_reg_limit_check(2.0, c(1.0), &[1.0, 10.0, 100.0]).unwrap();
    assert!((report.oracle.re - 0.25).abs() < 1e-10, "{:?}", report.oracle);
    assert!((report.oracle_closed_form.re - 0.25).abs() < 1e-10);
    assert!((report.claim.re - 0.5).abs() < 1e-10);
    assert!(report.oracle_error_monotone);
    assert_eq!(report.verdict, LimitVerdict::Oracle, "{report:#?}");
}

#[test]
fn limit_at_unit_mu_uses_direct_integral() {
    let z = c(1.5);
    let report = gamma_reg_limit_check(1.0, z, &[1.0, 10.0, 100.0]).unwrap();
    assert!(rel(report.oracle, report.oracle_closed_form) < 1e-10);
    assert!(report.oracle_error_monotone);
}

fn loop_input(z: ComplexTrig<f64>, mu: TrigPoly<f64>, n_samples: u64, seed: u64) -> LoopGammaInput<f64> {
    LoopGammaInput { z, mu, t: 1.0, grid: Grid::new(64).unwrap(), n_samples, seed }
}

/// `Var(Σ a_j x_j)` for the discrete bridge, from its covariance `t·s(2π − s)/2π` on the nodes.
fn bridge_form(a: &[f64], grid: Grid, t: f64) -> f64 {
    let nodes: Vec<f64> = grid.nodes().collect();
    let mut q = 0.0;
    for (i, &s) in nodes.iter().enumerate() {
        for (j, &r) in nodes.iter().enumerate() {
            q += a[i] * a[j] * t * s.min(r) * (TAU - s.max(r)) / TAU;
        }
    }
    q
}

#[test]
fn loop_gamma_normalization_and_gaussian_moment() {
    let e = loop_gamma_estimate(&loop_input(ComplexTrig::zero(), TrigPoly::zero(), 1_000, 1)).unwrap();
    assert_eq!(e.mean, c(1.0));
    assert_eq!(e.stderr, 0.0);

    let z = TrigPoly::new(0.2, vec![0.3], vec![-0.1]);
    let input = loop_input(ComplexTrig::real(z.clone()), TrigPoly::zero(), 100_000, 2);
    let w = input.grid.trapezoid_weights::<f64>();
    let a: Vec<f64> = input.grid.nodes::<f64>().zip(&w).map(|(u, w)| w * z.value(u)).collect();
    let oracle = (0.5 * bridge_form(&a, input.grid, 1.0)).exp();
    let e = loop_gamma_estimate(&input).unwrap();
    assert!(e.within_sigmas(c(oracle), 3.0), "{e:?} vs {oracle}");
}

#[test]
fn loop_gamma_seeds_agree() {
    let a = loop_gamma_estimate(&loop_input(ComplexTrig::zero(), TrigPoly::constant(1.0), 100_000, 3)).unwrap();
    let b = loop_gamma_estimate(&loop_input(ComplexTrig::zero(), TrigPoly::constant(1.0), 100_000, 4)).unwrap();
    let spread = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.mean - b.mean).norm() <= 3.0 * spread);
    assert!(loop_gamma_estimate(&loop_input(ComplexTrig::zero(), TrigPoly::constant(-0.1), 10, 0)).is_err());
}

#[test]
fn loop_functional_equation_without_potential() {
    let z = ComplexTrig::real(TrigPoly::new(0.1, vec![0.2], vec![0.3]));
    let g = TrigPoly::sin_mode(1, 1.0);
    let r = loop_gamma_functional_eq_residual(&g, &loop_input(z, TrigPoly::zero(), 200_000, 5), 1.0).unwrap();
    assert!(r.residual.within_sigmas(c(0.0), 3.0), "{r:?}");
}

#[test]
fn loop_functional_equation_trivial_and_rejections() {
    let input = loop_input(ComplexTrig::real(TrigPoly::constant(0.3)), TrigPoly::constant(1.0), 1_000, 6);
    let r = loop_gamma_functional_eq_residual(&TrigPoly::zero(), &input, 1.0).unwrap();
    assert_eq!(r.residual.mean, c(0.0));
    assert!(loop_gamma_functional_eq_residual(&TrigPoly::cos_mode(1, 1.0), &input, 1.0).is_err());
}

#[test]
fn loop_functional_equation_with_unit_potential() {
    // g = 2 sin²(u/2)
    let g = TrigPoly::new(1.0, vec![-1.0], vec![]);
    let input = loop_input(ComplexTrig::real(TrigPoly::constant(0.3)), TrigPoly::constant(1.0), 200_000, 7);
    let r = loop_gamma_functional_eq_residual(&g, &input, 1.0).unwrap();
    assert!(r.residual.within_sigmas(c(0.0), 3.0), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn regularized_functional_equation_holds(mu in 0.2..3.0f64, t in 0.5..3.0f64, re in -1.0..2.0f64, im in -1.0..1.0f64) {
        let r = gamma_reg_functional_residual(GammaRegParams::new(mu, t).unwrap(), Complex::new(re, im), 1e-4).unwrap();
        let scale = gamma_reg(GammaRegParams::new(mu, t).unwrap(), Complex::new(re, im)).unwrap().norm();
        prop_assert!(r.norm() <= 1e-6 * (1.0 + scale));
    }
}
