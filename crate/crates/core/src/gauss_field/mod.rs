//! Gaussian fields on truncated Fourier modes: the vacua of the affine `A` and `K` current
//! algebras, their exponential correlators, and the Heisenberg–Fock two-point function.

pub mod modes;

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::{self, McEstimate};
use crate::scalar::Real;

pub use modes::{
    apply_generator, commutator_with_multiplication, vacuum_expectation, BasisMonomial, ExactFock, FockOrientation, Generator, LinearForm,
    ModeSpace, Op,
};

/// Which current algebra the field realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    /// Real zero mode `x₀` with weight `ξ₀`; exponentials `e^{±x}`.
    A,
    /// Compact zero mode `φ`; exponentials `e^{±ix^c}` with a charge selection rule.
    K,
}

/// Mode weights `ξ₀` (algebra `A` only) and `ξ₁ … ξ_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence<T> {
    pub algebra: Algebra,
    pub xi0: T,
    /// `xi[n − 1] = ξ_n`.
    pub xi: Vec<T>,
}

impl<T: Real> WeightSequence<T> {
    pub fn new(algebra: Algebra, xi0: Option<T>, xi: Vec<T>) -> Result<Self> {
        if xi.iter().any(|&x| !(x > T::zero() && x.is_finite())) {
            return Err(invalid("xi", "weights must be positive and finite"));
        }
        let xi0 = match (algebra, xi0) {
            (Algebra::A, Some(x)) if x > T::zero() && x.is_finite() => x,
            (Algebra::A, _) => return Err(invalid("xi0", "algebra A needs a positive zero-mode weight")),
            (Algebra::K, None) => T::zero(),
            (Algebra::K, Some(_)) => return Err(invalid("xi0", "algebra K has no zero-mode weight")),
        };
        Ok(Self { algebra, xi0, xi })
    }

    /// `ξ_n = ratioⁿ` for `1 ≤ n ≤ cutoff`.
    pub fn geometric(algebra: Algebra, xi0: Option<T>, ratio: T, cutoff: usize) -> Result<Self> {
        Self::new(algebra, xi0, (1..=cutoff).map(|n| ratio.powi(n as i32)).collect())
    }

    /// `ξ_n = 1/n²`.
    pub fn inverse_square(algebra: Algebra, xi0: Option<T>, cutoff: usize) -> Result<Self> {
        Self::new(algebra, xi0, (1..=cutoff).map(|n| T::one() / T::from_usize_lossy(n * n)).collect())
    }

    pub fn cutoff(&self) -> usize {
        self.xi.len()
    }

    /// `ξ_n` for `n ≥ 0`, zero beyond the cutoff.
    pub fn weight(&self, n: usize) -> T {
        if n == 0 {
            self.xi0
        } else {
            self.xi.get(n - 1).copied().unwrap_or(T::zero())
        }
    }
}

/// Covariance kernel `N(u, v) = 2 Σ_n ξ_n cos(n(u − v))`, with the `n = 0` term for algebra `A`.
pub fn kernel<T: Real>(w: &WeightSequence<T>, u: T, v: T) -> T {
    let theta = u - v;
    let two = T::lit(2.0);
    let modes: T = w.xi.iter().enumerate().map(|(k, &x)| x * (T::from_usize_lossy(k + 1) * theta).cos()).sum();
    two * (modes + w.xi0)
}

/// One draw of the truncated field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierField<T> {
    pub algebra: Algebra,
    /// `x₀` for algebra `A`, the angle `φ ∈ [0, 2π)` for `K`.
    pub zero_mode: T,
    /// `modes[n − 1] = x_n`; `x_{−n} = conj(x_n)`.
    pub modes: Vec<Complex<T>>,
}

impl<T: Real> FourierField<T> {
    /// `x(u) = x₀ + 2 Re Σ_{n>0} x_n e^{−inu}` (with `φ` in place of `x₀` for `K`).
    pub fn value(&self, u: T) -> T {
        let oscillating: T = self
            .modes
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let phase = T::from_usize_lossy(k + 1) * u;
                x.re * phase.cos() + x.im * phase.sin()
            })
            .sum();
        self.zero_mode + T::lit(2.0) * oscillating
    }

    /// `e^{σ x(u)}` for `A`, `e^{iσ x^c(u)}` for `K`.
    pub fn exponential(&self, charge: i8, u: T) -> Complex<T> {
        let s = T::from_i8(charge).unwrap();
        match self.algebra {
            Algebra::A => Complex::new((s * self.value(u)).exp(), T::zero()),
            Algebra::K => Complex::from_polar(T::one(), s * self.value(u)),
        }
    }
}

pub fn draw_field<T: Real, R: Rng + ?Sized>(w: &WeightSequence<T>, rng: &mut R) -> FourierField<T> {
    let half = T::lit(0.5);
    let zero_mode = match w.algebra {
        Algebra::A => (T::lit(2.0) * w.xi0).sqrt() * T::standard_normal(rng),
        Algebra::K => T::TAU() * T::unit_uniform(rng),
    };
    let modes =
        w.xi.iter()
            .map(|&x| {
                let sd = (half * x).sqrt();
                Complex::new(sd * T::standard_normal(rng), sd * T::standard_normal(rng))
            })
            .collect();
    FourierField { algebra: w.algebra, zero_mode, modes }
}

pub fn sample_field<T: Real>(w: &WeightSequence<T>, seed: u64) -> FourierField<T> {
    draw_field(w, &mut mc::sample_rng(seed, 0))
}

/// Vacuum correlator of exponentials `Π_j exp_{σ_j}(u_j)` (order irrelevant: they commute).
///
/// `A`: `exp(½ Σ_{j,l} σ_j σ_l N_A(u_j, u_l))`. `K`: zero unless the charges balance, else
/// `exp(−½ Σ_{j,l} σ_j σ_l N_K(u_j, u_l))`.
pub fn exp_correlator<T: Real>(w: &WeightSequence<T>, insertions: &[(T, i8)]) -> T {
    let charge: i32 = insertions.iter().map(|&(_, s)| s as i32).sum();
    if w.algebra == Algebra::K && charge != 0 {
        return T::zero();
    }
    let quad: T = insertions
        .iter()
        .flat_map(|&(u, s)| insertions.iter().map(move |&(v, r)| T::from_i32(s as i32 * r as i32).unwrap() * kernel(w, u, v)))
        .sum();
    let sign = match w.algebra {
        Algebra::A => T::lit(0.5),
        Algebra::K => T::lit(-0.5),
    };
    (sign * quad).exp()
}

/// `⟨exp₊(u₁)…exp₊(u_n) exp₋(v₁)…exp₋(v_m)⟩` in closed form.
pub fn correlator_exp_closed<T: Real>(plus: &[T], minus: &[T], w: &WeightSequence<T>) -> T {
    let insertions: Vec<(T, i8)> = plus.iter().map(|&u| (u, 1)).chain(minus.iter().map(|&v| (v, -1))).collect();
    exp_correlator(w, &insertions)
}

/// The `K` closed form with the zero-point term entering as `+n N_K(0,0)`, kept for reports that
/// show its disagreement with Gaussian integration.
pub fn correlator_exp_k_plus_sign<T: Real>(plus: &[T], minus: &[T], w: &WeightSequence<T>) -> T {
    if plus.len() != minus.len() {
        return T::zero();
    }
    let n0 = kernel(w, T::zero(), T::zero());
    let pairs = |xs: &[T]| -> T { xs.iter().enumerate().flat_map(|(i, &a)| xs[i + 1..].iter().map(move |&b| kernel(w, a, b))).sum() };
    let cross: T = plus.iter().flat_map(|&u| minus.iter().map(move |&v| kernel(w, u, v))).sum();
    (-pairs(plus) - pairs(minus) + cross + T::from_usize_lossy(plus.len()) * n0).exp()
}

/// Relative standard error above which an `A`-algebra estimate is rejected as heavy-tailed.
pub const BLOW_UP_LIMIT: f64 = 0.2;

/// Monte Carlo average of the same product of exponentials over field draws.
pub fn correlator_exp_mc<T: Real>(plus: &[T], minus: &[T], w: &WeightSequence<T>, n_samples: u64, seed: u64) -> Result<McEstimate<T>> {
    let est = mc::estimate(n_samples, seed, |rng, _| {
        let field = draw_field(w, rng);
        let p = plus.iter().map(|&u| field.exponential(1, u));
        let m = minus.iter().map(|&v| field.exponential(-1, v));
        p.chain(m).fold(Complex::new(T::one(), T::zero()), |acc, e| acc * e)
    })?;
    if w.algebra == Algebra::A {
        let relative = (est.stderr / est.mean.norm()).to_f64_lossy();
        if !(relative <= BLOW_UP_LIMIT) {
            return Err(Error::VarianceBlowUp { relative, limit: BLOW_UP_LIMIT });
        }
    }
    Ok(est)
}

/// `∫ e^{⟨β, x⟩} dμ_A = e^{½⟨β, Aβ⟩}` for the diagonal covariance `A = diag(variances)`.
pub fn gaussian_shift<T: Real>(beta: &[T], variances: &[T]) -> Result<T> {
    if beta.len() != variances.len() {
        return Err(Error::GridMismatch { expected: variances.len(), found: beta.len() });
    }
    let q: T = beta.iter().zip(variances).map(|(&b, &a)| b * a * b).sum();
    Ok((T::lit(0.5) * q).exp())
}

/// Paired estimate of `E[f(x + b)] − E[f(x) e^{⟨x, A⁻¹b⟩ − ½⟨b, A⁻¹b⟩}]` under `N(0, diag(variances))`.
pub fn shift_identity_check<T, F>(f: F, b: &[T], variances: &[T], n_samples: u64, seed: u64) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    if b.len() != variances.len() {
        return Err(Error::GridMismatch { expected: variances.len(), found: b.len() });
    }
    if variances.iter().any(|&a| !(a > T::zero())) {
        return Err(invalid("variances", "must be positive"));
    }
    let half_norm: T = T::lit(0.5) * b.iter().zip(variances).map(|(&bi, &a)| bi * bi / a).sum::<T>();
    mc::estimate(n_samples, seed, |rng, _| {
        let x: Vec<T> = variances.iter().map(|&a| a.sqrt() * T::standard_normal(rng)).collect();
        let shifted: Vec<T> = x.iter().zip(b).map(|(&xi, &bi)| xi + bi).collect();
        let tilt: T = x.iter().zip(b).zip(variances).map(|((&xi, &bi), &a)| xi * bi / a).sum();
        Complex::new(f(&shifted) - f(&x) * (tilt - half_norm).exp(), T::zero())
    })
}

/// Heisenberg current parameters: central charge `κ > 0` and highest weight `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockParams<T> {
    pub kappa: T,
    pub p: T,
}

impl<T: Real> FockParams<T> {
    pub fn new(kappa: T, p: T) -> Result<Self> {
        if !(kappa > T::zero() && kappa.is_finite() && p.is_finite()) {
            return Err(invalid("kappa", "central charge must be positive"));
        }
        Ok(Self { kappa, p })
    }
}

fn fock_argument<T: Real>(z1: Complex<T>, z2: Complex<T>) -> Result<Complex<T>> {
    let w = z1.conj() * z2;
    if !(w.norm() < T::one()) {
        return Err(invalid("points", "two-point function needs |conj(z1)·z2| < 1"));
    }
    Ok(w)
}

/// `⟨vac_p, ρ(z₁)ρ(z₂) vac_p⟩ = 2κw/(1 − w)² + p²` with `w = conj(z₁)·z₂`.
pub fn heisenberg_two_point<T: Real>(z1: Complex<T>, z2: Complex<T>, params: FockParams<T>) -> Result<Complex<T>> {
    let w = fock_argument(z1, z2)?;
    let one = Complex::new(T::one(), T::zero());
    let d = one - w;
    Ok(w * T::lit(2.0) * params.kappa / (d * d) + params.p * params.p)
}

/// The same two-point function as the mode sum `Σ_{n=1}^{modes} 2κn wⁿ + p²`.
pub fn heisenberg_two_point_truncated<T: Real>(z1: Complex<T>, z2: Complex<T>, params: FockParams<T>, modes: usize) -> Result<Complex<T>> {
    let w = fock_argument(z1, z2)?;
    let mut power = Complex::new(T::one(), T::zero());
    let mut sum = Complex::new(params.p * params.p, T::zero());
    for n in 1..=modes {
        power = power * w;
        sum = sum + power * (T::lit(2.0) * params.kappa * T::from_usize_lossy(n));
    }
    Ok(sum)
}

/// Bound on the neglected tail `Σ_{n>modes} 2κn|w|ⁿ`.
pub fn heisenberg_tail_bound<T: Real>(abs_w: T, kappa: T, modes: usize) -> T {
    let m = T::from_usize_lossy(modes);
    let one = T::one();
    T::lit(2.0) * kappa * abs_w.powi(modes as i32 + 1) * ((m + one) - m * abs_w) / ((one - abs_w) * (one - abs_w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_single(c: f64) -> WeightSequence<f64> {
        WeightSequence::new(Algebra::K, None, vec![c]).unwrap()
    }

    #[test]
    fn kernel_single_mode_and_zero_mode_offset() {
        let w = k_single(0.7);
        assert!((kernel(&w, 1.3, 0.4) - 1.4 * 0.9f64.cos()).abs() < 1e-15);
        let k = WeightSequence::new(Algebra::K, None, vec![0.5, 0.25]).unwrap();
        let a = WeightSequence::new(Algebra::A, Some(0.3), vec![0.5, 0.25]).unwrap();
        for (u, v) in [(0.0, 0.0), (0.2, 2.9), (-1.0, 4.0)] {
            assert!((kernel(&a, u, v) - kernel(&k, u, v) - 0.6f64).abs() < 1e-14);
        }
        assert!((kernel(&k, 0.0, 0.0) - 1.5f64).abs() < 1e-15);
    }

    #[test]
    fn weights_are_validated() {
        assert!(WeightSequence::new(Algebra::K, None, vec![1.0, 0.0]).is_err());
        assert!(WeightSequence::<f64>::new(Algebra::A, None, vec![1.0]).is_err());
        assert!(WeightSequence::new(Algebra::K, Some(1.0), vec![1.0]).is_err());
    }

    #[test]
    fn k_selection_rule_and_a_single_insertion() {
        let w = k_single(0.5);
        assert_eq!(correlator_exp_closed(&[0.3], &[], &w), 0.0);
        let a = WeightSequence::new(Algebra::A, Some(0.2), vec![0.5]).unwrap();
        let n0 = kernel(&a, 0.0, 0.0);
        assert!((correlator_exp_closed(&[1.1], &[], &a) - (0.5f64 * n0).exp()).abs() < 1e-14);
    }

    #[test]
    fn fields_are_real_with_uniform_phase() {
        let w = k_single(0.5);
        let f = sample_field(&w, 3);
        assert!(f.zero_mode >= 0.0 && f.zero_mode < std::f64::consts::TAU);
        assert!((f.exponential(1, 0.4).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_point_edge_cases() {
        let params = FockParams::new(1.0, 0.0).unwrap();
        let zero = Complex::new(0.0, 0.0);
        assert_eq!(heisenberg_two_point(zero, zero, params).unwrap(), zero);
        let half = Complex::new(0.5f64.sqrt(), 0.0);
        let v = heisenberg_two_point(half, half, params).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12);
        let one = Complex::new(1.0, 0.0);
        assert!(heisenberg_two_point(one, one, params).is_err());
    }
}
