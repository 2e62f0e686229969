//! First-order differential operators on polynomials in truncated loop modes.
//!
//! A based loop is `x(u) = Σₙ cₙ(cos nu − 1) + sₙ sin nu`, `n = 1..=N`, and the zero mode is `x₀`.
//! Variable `0` is `x₀`, `2n − 1` is `cₙ` and `2n` is `sₙ`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth::{ComplexTrig, Smooth, TrigPoly};

pub const X0: usize = 0;

pub fn cos_var(n: usize) -> usize {
    2 * n - 1
}

pub fn sin_var(n: usize) -> usize {
    2 * n
}

/// Polynomial with complex coefficients, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePoly {
    n_vars: usize,
    terms: BTreeMap<Vec<u8>, Complex64>,
}

impl ModePoly {
    pub fn zero(n_vars: usize) -> Self {
        Self { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(vec![0; n_vars], c);
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    fn add_term(&mut self, exps: Vec<u8>, c: Complex64) {
        let entry = self.terms.entry(exps).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&d| d as usize).sum()).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.terms.get(&vec![0; self.n_vars]).copied().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, &c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * e[i] as f64);
            }
        }
        out
    }

    /// Terms of total degree at most `max_degree`.
    pub fn truncated(&self, max_degree: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().map(|&d| d as usize).sum::<usize>() <= max_degree)
            .map(|(e, &c)| (e.clone(), c))
            .collect();
        Self { n_vars: self.n_vars, terms }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `Σᵢ vᵢ ∂ᵢ + v₀` with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePolynomialOperator {
    pub n_modes: usize,
    pub vector: Vec<ModePoly>,
    pub scalar: ModePoly,
}

impl ModePolynomialOperator {
    pub fn n_vars(&self) -> usize {
        2 * self.n_modes + 1
    }

    pub fn multiplication(n_modes: usize, scalar: ModePoly) -> Self {
        let n = 2 * n_modes + 1;
        Self { n_modes, vector: vec![ModePoly::zero(n); n], scalar }
    }

    /// The vector-field part applied to `p`.
    pub fn derive(&self, p: &ModePoly) -> ModePoly {
        self.vector.iter().enumerate().fold(ModePoly::zero(self.n_vars()), |acc, (i, v)| acc.add(&v.mul(&p.derivative(i))))
    }

    pub fn apply(&self, p: &ModePoly) -> ModePoly {
        self.derive(p).add(&self.scalar.mul(p))
    }

    /// `[A, B] = Σⱼ (A(bⱼ) − B(aⱼ)) ∂ⱼ + (A(b₀) − B(a₀))`.
    pub fn commutator(&self, other: &Self) -> Self {
        let vector = self.vector.iter().zip(&other.vector).map(|(a, b)| self.derive(b).sub(&other.derive(a))).collect();
        let scalar = self.derive(&other.scalar).sub(&other.derive(&self.scalar));
        Self { n_modes: self.n_modes, vector, scalar }
    }

    /// The value when the operator is multiplication by a constant.
    pub fn as_scalar(&self, tol: f64) -> Option<Complex64> {
        let constant_only = self.scalar.terms().all(|(e, c)| e.iter().all(|&d| d == 0) || c.norm() <= tol);
        let no_vector = self.vector.iter().all(|v| v.max_abs_coeff() <= tol);
        (constant_only && no_vector).then(|| self.scalar.constant_term())
    }
}

fn check_cutoff(p: &TrigPoly<f64>, n_modes: usize) -> Result<()> {
    match p.degree() {
        d if d > n_modes => Err(Error::CutoffExceeded { needed: d, cutoff: n_modes }),
        _ => Ok(()),
    }
}

/// `D_{α,k} = α(0)∂_{x₀} + ∫α̃ δ/δx − (1/2t)∫α̃′x′ − ik∫α̃x′`, the generator of `ρ(e^{εα})`.
///
/// In modes, `∫α̃ δ/δx = Σ aₙ∂_{cₙ} + bₙ∂_{sₙ}`, `∫α̃′x′ = Σ πn²(aₙcₙ + bₙsₙ)` and
/// `∫α̃x′ = Σ πn(aₙsₙ − bₙcₙ)` for `α = a₀ + Σ aₙ cos nu + bₙ sin nu`.
pub fn lie_generator_d(alpha: &TrigPoly<f64>, k: f64, t: f64, n_modes: usize) -> Result<ModePolynomialOperator> {
    check_cutoff(alpha, n_modes)?;
    let nv = 2 * n_modes + 1;
    let c = |x: f64| Complex64::new(x, 0.0);
    let pi = std::f64::consts::PI;
    let mut vector = vec![ModePoly::zero(nv); nv];
    vector[X0] = ModePoly::constant(nv, c(alpha.value(0.0)));
    let mut scalar = ModePoly::zero(nv);
    for n in 1..=n_modes {
        let (a, b, nf) = (alpha.cos_coeff(n), alpha.sin_coeff(n), n as f64);
        vector[cos_var(n)] = ModePoly::constant(nv, c(a));
        vector[sin_var(n)] = ModePoly::constant(nv, c(b));
        let girsanov = ModePoly::var(nv, cos_var(n)).scale(c(a)).add(&ModePoly::var(nv, sin_var(n)).scale(c(b)));
        let central = ModePoly::var(nv, sin_var(n)).scale(c(a)).sub(&ModePoly::var(nv, cos_var(n)).scale(c(b)));
        scalar = scalar.add(&girsanov.scale(c(-pi * nf * nf / (2.0 * t)))).add(&central.scale(Complex64::new(0.0, -k * pi * nf)));
    }
    Ok(ModePolynomialOperator { n_modes, vector, scalar })
}

/// `T_b = ∫ λ b e^{x₀+x(u)} du` with the exponential expanded to total degree `order`.
///
/// The integrand is a trigonometric polynomial in `u`, so the rectangle rule on enough nodes
/// integrates it exactly.
pub fn lie_generator_t(b: &TrigPoly<f64>, lambda: &ComplexTrig<f64>, n_modes: usize, order: usize) -> Result<ModePolynomialOperator> {
    let nv = 2 * n_modes + 1;
    let trig_degree = order * n_modes + b.degree() + lambda.re.degree().max(lambda.im.degree());
    let m = 2 * (trig_degree + 1);
    let h = std::f64::consts::TAU / m as f64;
    let mut scalar = ModePoly::zero(nv);
    for j in 0..m {
        let u = h * j as f64;
        let mut linear = ModePoly::var(nv, X0);
        for n in 1..=n_modes {
            let nu = n as f64 * u;
            linear = linear
                .add(&ModePoly::var(nv, cos_var(n)).scale(Complex64::new(nu.cos() - 1.0, 0.0)))
                .add(&ModePoly::var(nv, sin_var(n)).scale(Complex64::new(nu.sin(), 0.0)));
        }
        let weight = lambda.eval(u) * (b.value(u) * h);
        let mut power = ModePoly::constant(nv, Complex64::new(1.0, 0.0));
        let mut factorial = 1.0;
        for p in 0..=order {
            if p > 0 {
                power = power.mul(&linear);
                factorial *= p as f64;
            }
            scalar = scalar.add(&power.scale(weight / factorial));
        }
    }
    Ok(ModePolynomialOperator::multiplication(n_modes, scalar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_product() {
        let x = ModePoly::var(3, 1);
        let y = ModePoly::var(3, 2);
        let p = x.mul(&x).mul(&y).add(&ModePoly::constant(3, Complex64::new(2.0, 0.0)));
        let dp = p.derivative(1);
        assert_eq!(dp, x.mul(&y).scale(Complex64::new(2.0, 0.0)));
        assert_eq!(p.degree(), 3);
        assert_eq!(p.truncated(2), ModePoly::constant(3, Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn cutoff_is_enforced() {
        let alpha = TrigPoly::sin_mode(3, 1.0);
        assert_eq!(lie_generator_d(&alpha, 1.0, 1.0, 2), Err(Error::CutoffExceeded { needed: 3, cutoff: 2 }));
    }

    #[test]
    fn self_commutator_vanishes() {
        let d = lie_generator_d(&TrigPoly::new(0.3, vec![1.0], vec![0.2, -0.5]), 0.7, 1.3, 2).unwrap();
        assert_eq!(d.commutator(&d).as_scalar(0.0), Some(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn t_generator_constant_term() {
        // Zeroth order: ∫ λ b du.
        let lambda = ComplexTrig { re: TrigPoly::zero(), im: TrigPoly::constant(1.0) };
        let b = TrigPoly::new(2.0, vec![0.5], vec![]);
        let t = lie_generator_t(&b, &lambda, 2, 3).unwrap();
        let c = t.scalar.constant_term();
        assert!((c - Complex64::new(0.0, 4.0 * std::f64::consts::PI)).norm() < 1e-12);
    }
}
