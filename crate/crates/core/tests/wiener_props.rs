use std::f64::consts::{PI, TAU};

use loopax::smooth::{ComplexTrig, Smooth, TrigPoly};
use loopax::wiener::{self, fourier_wiener_exp, gaussian_moment, mc_expect, translation_weight, Functional, Grid, Path, PathKind};
use num_complex::Complex;
use proptest::prelude::*;

const SIGMAS: f64 = 3.0;

fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

/// Variance of `Σ_j a_j x_j` under the increment construction of the sampler: each path value is
/// a linear image of i.i.d. `N(0, tΔ)` increments (with the bridge's linear correction).
fn linear_form_variance(a: &[f64], n: usize, t: f64, bridge: bool) -> f64 {
    let h = TAU / n as f64;
    (0..n)
        .map(|k| {
            // Increment k enters x_j for j > k; the bridge subtracts (j/n)·ξ_k from every x_j.
            let coeff: f64 = (0..=n)
                .map(|j| {
                    let direct = if j > k { 1.0 } else { 0.0 };
                    let correction = if bridge { j as f64 / n as f64 } else { 0.0 };
                    a[j] * (direct - correction)
                })
                .sum();
            coeff * coeff * t * h
        })
        .sum()
}

#[test]
fn free_endpoint_variance_is_t_times_length() {
    let grid = Grid::new(2).unwrap();
    let e = mc_expect(|p: &Path<f64>| re(p.values[2].powi(2)), 1.0, grid, PathKind::Free, 100_000, 17).unwrap();
    assert!(e.within_sigmas(re(TAU), SIGMAS), "{e:?}");
}

#[test]
fn free_covariance_is_t_min() {
    let grid = Grid::new(16).unwrap();
    let t = 0.7;
    for (i, j) in [(4, 12), (8, 8), (2, 15)] {
        let e = mc_expect(|p: &Path<f64>| re(p.values[i] * p.values[j]), t, grid, PathKind::Free, 100_000, 5).unwrap();
        let oracle = t * grid.node::<f64>(i.min(j));
        assert!(e.within_sigmas(re(oracle), SIGMAS), "({i},{j}) {e:?} vs {oracle}");
    }
}

#[test]
fn bridge_midpoint_moments() {
    let grid = Grid::new(32).unwrap();
    let var = mc_expect(|p: &Path<f64>| re(p.values[16].powi(2)), 1.0, grid, PathKind::Bridge { endpoint: 0.0 }, 100_000, 8).unwrap();
    assert!(var.within_sigmas(re(PI * (TAU - PI) / TAU), SIGMAS), "{var:?}");
    let mean = mc_expect(|p: &Path<f64>| re(p.values[16]), 1.0, grid, PathKind::Bridge { endpoint: 4.0 }, 100_000, 9).unwrap();
    assert!(mean.within_sigmas(re(2.0), SIGMAS), "{mean:?}");
}

#[test]
fn girsanov_weight_has_unit_mean_for_free_paths() {
    let grid = Grid::new(128).unwrap();
    let directions = [TrigPoly::sin_mode(1, 1.0), TrigPoly::new(0.0, vec![0.3], vec![0.0, 0.8])];
    for (k, y) in directions.iter().enumerate() {
        let e = mc_expect(|p: &Path<f64>| re(translation_weight(y, p, 1.5).unwrap()), 1.5, grid, PathKind::Free, 100_000, 40 + k as u64)
            .unwrap();
        assert!(e.within_sigmas(re(1.0), SIGMAS), "direction {k}: {e:?}");
    }
}

#[test]
fn translation_identity_for_exponential_functionals() {
    let grid = Grid::new(256).unwrap();
    let t = 1.0;
    let z = ComplexTrig::real(TrigPoly::new(0.1, vec![0.2], vec![-0.15]));
    let f = Functional::Exponential(z);
    let y = TrigPoly::sin_mode(1, 0.4);
    let kind = PathKind::Bridge { endpoint: 0.0 };
    let plain = mc_expect(|p: &Path<f64>| f.eval(p), t, grid, kind, 100_000, 21).unwrap();
    let shifted =
        mc_expect(|p: &Path<f64>| f.eval(&p.translated(&y)) * translation_weight(&y, p, t).unwrap(), t, grid, kind, 100_000, 22).unwrap();
    let spread = (plain.stderr.powi(2) + shifted.stderr.powi(2)).sqrt();
    assert!((plain.mean - shifted.mean).norm() <= SIGMAS * spread, "{plain:?} vs {shifted:?}");
}

#[test]
fn exponential_moment_matches_construction_oracle() {
    let n = 64;
    let grid = Grid::new(n).unwrap();
    let t = 0.8;
    let z = ComplexTrig::real(TrigPoly::new(0.0, vec![0.25, 0.1], vec![0.3]));
    let w = grid.trapezoid_weights::<f64>();
    let a: Vec<f64> = grid.nodes::<f64>().zip(&w).map(|(u, w)| z.re.value(u) * w).collect();
    let oracle = (0.5 * linear_form_variance(&a, n, t, true)).exp();
    let closed = gaussian_moment(&z, PathKind::Bridge { endpoint: 0.0 }, t, grid);
    assert!((closed.re - oracle).abs() < 1e-12 * oracle, "{closed} vs {oracle}");
    let f = Functional::Exponential(z);
    let e = mc_expect(|p: &Path<f64>| f.eval(p), t, grid, PathKind::Bridge { endpoint: 0.0 }, 100_000, 3).unwrap();
    assert!(e.within_sigmas(re(oracle), SIGMAS), "{e:?} vs {oracle}");
}

#[test]
fn fourier_wiener_transform_matches_mc() {
    let grid = Grid::new(64).unwrap();
    let t = 0.5;
    let z = ComplexTrig::real(TrigPoly::new(0.0, vec![0.2], vec![0.4]));
    let f = Functional::Exponential(z.clone());
    let y = wiener::sample_bridge(1.0, 0.0, grid, 77).unwrap();
    let closed = fourier_wiener_exp(&f, &y, t).unwrap();
    let i = Complex::new(0.0, 1.0);
    let e = mc_expect(
        |x: &Path<f64>| {
            let shifted: Complex<f64> = x.integrate_against(|u| z.eval(u)) + y.integrate_against(|u| z.eval(u)) * i;
            shifted.exp()
        },
        2.0 * t,
        grid,
        PathKind::Bridge { endpoint: 0.0 },
        100_000,
        78,
    )
    .unwrap();
    assert!(e.within_sigmas(closed, SIGMAS), "{e:?} vs {closed}");
    let flat = Path { grid, values: vec![0.0; 65], variance_t: 1.0, kind: PathKind::Bridge { endpoint: 0.0 } };
    let at_zero = fourier_wiener_exp(&f, &flat, t).unwrap();
    let moment = gaussian_moment(&z, PathKind::Bridge { endpoint: 0.0 }, 2.0 * t, grid);
    assert!((at_zero - moment).norm() < 1e-14);
}

#[test]
fn free_paths_binned_at_the_endpoint_reproduce_bridges() {
    // Disintegration: conditioning free paths on x(2π) ≈ X recovers the bridge to X.
    let grid = Grid::new(32).unwrap();
    let (target, half_width): (f64, f64) = (1.0, 0.05);
    let functional = |p: &Path<f64>| (0.5 * p.values[10]).cos() + p.values[20];
    let joint = loopax::mc::estimate_many::<f64, _>(400_000, 61, 2, |rng, _, out| {
        let p = wiener::draw_free_path(1.0, grid, rng).unwrap();
        let inside = ((p.values[32] - target).abs() < half_width) as u8 as f64;
        out[0] = re(inside * functional(&p));
        out[1] = re(inside);
    })
    .unwrap();
    let conditional: f64 = joint[0].mean.re / joint[1].mean.re;
    let n_in = joint[1].mean.re * 400_000.0;
    let bridge = mc_expect(|p: &Path<f64>| re(functional(p)), 1.0, grid, PathKind::Bridge { endpoint: target }, 100_000, 62).unwrap();
    // Conditional stderr from the in-bin sample, plus the bridge estimate's own error.
    let in_bin_sd: f64 = 1.5;
    let spread = (in_bin_sd.powi(2) / n_in + bridge.stderr.powi(2)).sqrt();
    assert!((conditional - bridge.mean.re).abs() <= SIGMAS * spread, "{conditional} vs {bridge:?}");
}

#[test]
fn identical_seeds_are_bit_identical() {
    let grid = Grid::new(64).unwrap();
    let y = TrigPoly::sin_mode(2, 0.5);
    let run = || {
        mc_expect(|p: &Path<f64>| re(translation_weight(&y, p, 1.0).unwrap()), 1.0, grid, PathKind::Bridge { endpoint: 0.0 }, 10_000, 99)
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let path = wiener::sample_bridge(1.0, 0.5, grid, 4).unwrap();
    let back: Path<f64> = serde_json::from_str(&serde_json::to_string(&path).unwrap()).unwrap();
    assert_eq!(back, path);
}

proptest! {
    #[test]
    fn stieltjes_pairing_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64, seed in 0u64..1000) {
        let grid = Grid::new(32).unwrap();
        let x = wiener::sample_free_path(1.0, grid, seed).unwrap();
        let (p, q) = (TrigPoly::sin_mode(1, 1.0), TrigPoly::cos_mode(3, 1.0));
        let combo = p.scale(a).add(&q.scale(b));
        let lhs = wiener::stieltjes_pair(&combo, &x);
        let rhs = a * wiener::stieltjes_pair(&p, &x) + b * wiener::stieltjes_pair(&q, &x);
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn bridge_is_pinned_for_any_endpoint(endpoint in -5.0..5.0f64, t in 0.1..4.0f64, seed in 0u64..1000) {
        let grid = Grid::new(24).unwrap();
        let p = wiener::sample_bridge(t, endpoint, grid, seed).unwrap();
        prop_assert_eq!(p.values[0], 0.0);
        prop_assert_eq!(p.values[24], endpoint);
    }
}
