//! Smooth functions on `[0, 2π]`: Cameron–Martin directions, loop data and test functions.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A real function with derivatives up to second order.
pub trait Smooth<T: Real>: Send + Sync {
    fn value(&self, u: T) -> T;
    fn derivative(&self, u: T) -> T;
    fn second_derivative(&self, u: T) -> T;
}

/// Real trigonometric polynomial `c + Σ aₙ cos(nu) + bₙ sin(nu)`, `n = 1..=degree`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly<T> {
    pub constant: T,
    pub cos: Vec<T>,
    pub sin: Vec<T>,
}

impl<T: Real> TrigPoly<T> {
    pub fn zero() -> Self {
        Self { constant: T::zero(), cos: Vec::new(), sin: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self { constant: c, cos: Vec::new(), sin: Vec::new() }
    }

    /// `amp · cos(n u)`.
    pub fn cos_mode(n: usize, amp: T) -> Self {
        let mut p = Self::zero();
        p.set_cos(n, amp);
        p
    }

    /// `amp · sin(n u)`.
    pub fn sin_mode(n: usize, amp: T) -> Self {
        let mut p = Self::zero();
        p.set_sin(n, amp);
        p
    }

    pub fn new(constant: T, cos: Vec<T>, sin: Vec<T>) -> Self {
        Self { constant, cos, sin }
    }

    pub fn degree(&self) -> usize {
        let last = |v: &[T]| v.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
        last(&self.cos).max(last(&self.sin))
    }

    pub fn cos_coeff(&self, n: usize) -> T {
        self.cos.get(n - 1).copied().unwrap_or_else(T::zero)
    }

    pub fn sin_coeff(&self, n: usize) -> T {
        self.sin.get(n - 1).copied().unwrap_or_else(T::zero)
    }

    fn set_cos(&mut self, n: usize, c: T) {
        if self.cos.len() < n {
            self.cos.resize(n, T::zero());
        }
        self.cos[n - 1] = c;
    }

    fn set_sin(&mut self, n: usize, c: T) {
        if self.sin.len() < n {
            self.sin.resize(n, T::zero());
        }
        self.sin[n - 1] = c;
    }

    pub fn scale(&self, s: T) -> Self {
        Self { constant: self.constant * s, cos: self.cos.iter().map(|&c| c * s).collect(), sin: self.sin.iter().map(|&c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let mut out = Self::constant(self.constant + other.constant);
        for n in 1..=d {
            out.set_cos(n, self.cos_coeff(n) + other.cos_coeff(n));
            out.set_sin(n, self.sin_coeff(n) + other.sin_coeff(n));
        }
        out
    }

    /// Pointwise product, expanded by the product-to-sum formulas.
    pub fn mul(&self, other: &Self) -> Self {
        let half = T::lit(0.5);
        // Index 0 of each list is the constant: cos(0·u) = 1.
        let terms = |p: &Self| {
            let mut cos = vec![p.constant];
            let mut sin = vec![T::zero()];
            for n in 1..=p.degree() {
                cos.push(p.cos_coeff(n));
                sin.push(p.sin_coeff(n));
            }
            (cos, sin)
        };
        let ((c1, s1), (c2, s2)) = (terms(self), terms(other));
        let mut out = Self::zero();
        let add_cos = |out: &mut Self, k: isize, v: T| {
            let k = k.unsigned_abs();
            if k == 0 {
                out.constant = out.constant + v;
            } else {
                out.set_cos(k, out.cos_coeff(k) + v);
            }
        };
        let add_sin = |out: &mut Self, k: isize, v: T| {
            let (k, v) = if k < 0 { (k.unsigned_abs(), -v) } else { (k as usize, v) };
            if k > 0 {
                out.set_sin(k, out.sin_coeff(k) + v);
            }
        };
        for n in 0..c1.len() {
            for m in 0..c2.len() {
                let (ni, mi) = (n as isize, m as isize);
                let cc = c1[n] * c2[m] * half;
                let ss = s1[n] * s2[m] * half;
                let sc = s1[n] * c2[m] * half;
                let cs = c1[n] * s2[m] * half;
                add_cos(&mut out, ni - mi, cc + ss);
                add_cos(&mut out, ni + mi, cc - ss);
                add_sin(&mut out, ni + mi, sc + cs);
                add_sin(&mut out, ni - mi, sc - cs);
            }
        }
        out
    }

    /// Derivative of order `k`, again a trigonometric polynomial.
    pub fn derivative_poly(&self, k: usize) -> Self {
        let mut out = Self::zero();
        if k == 0 {
            return self.clone();
        }
        for n in 1..=self.degree() {
            let nn = T::from_usize_lossy(n).powi(k as i32);
            let (a, b) = (self.cos_coeff(n), self.sin_coeff(n));
            // d/du (a cos + b sin) = n (b cos − a sin); the pattern repeats with period 4.
            let (c, s) = match k % 4 {
                0 => (a, b),
                1 => (b, -a),
                2 => (-a, -b),
                _ => (-b, a),
            };
            out.set_cos(n, c * nn);
            out.set_sin(n, s * nn);
        }
        out
    }

    pub fn eval_derivative(&self, k: usize, u: T) -> T {
        let mut acc = if k == 0 { self.constant } else { T::zero() };
        for n in 1..=self.degree() {
            let nf = T::from_usize_lossy(n);
            let (s, c) = (nf * u).sin_cos();
            let (a, b) = (self.cos_coeff(n), self.sin_coeff(n));
            let (cc, ss) = match k % 4 {
                0 => (a, b),
                1 => (b, -a),
                2 => (-a, -b),
                _ => (-b, a),
            };
            acc = acc + nf.powi(k as i32) * (cc * c + ss * s);
        }
        acc
    }

    /// `∫₀^{2π} p(u) q(u) du`, exact from the coefficients.
    pub fn inner(&self, other: &Self) -> T {
        let pi = T::PI();
        let mut acc = T::lit(2.0) * pi * self.constant * other.constant;
        for n in 1..=self.degree().max(other.degree()) {
            acc = acc + pi * (self.cos_coeff(n) * other.cos_coeff(n) + self.sin_coeff(n) * other.sin_coeff(n));
        }
        acc
    }

    /// `∫₀^{2π} p(u) du`.
    pub fn integral(&self) -> T {
        T::TAU() * self.constant
    }

    pub fn is_periodic_zero_at_ends(&self) -> bool {
        self.value(T::zero()).abs() <= T::lit(1e-12) * (T::one() + self.sup_bound())
    }

    /// Crude bound `|c| + Σ(|aₙ| + |bₙ|)` on the sup norm.
    pub fn sup_bound(&self) -> T {
        self.cos.iter().chain(self.sin.iter()).fold(self.constant.abs(), |acc, c| acc + c.abs())
    }
}

impl<T: Real> Smooth<T> for TrigPoly<T> {
    fn value(&self, u: T) -> T {
        self.eval_derivative(0, u)
    }
    fn derivative(&self, u: T) -> T {
        self.eval_derivative(1, u)
    }
    fn second_derivative(&self, u: T) -> T {
        self.eval_derivative(2, u)
    }
}

type RealFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Closed-form function given by evaluators for the value and first two derivatives.
#[derive(Clone)]
pub struct FnSmooth<T> {
    f: RealFn<T>,
    df: RealFn<T>,
    d2f: RealFn<T>,
}

impl<T: Real> FnSmooth<T> {
    pub fn new(
        f: impl Fn(T) -> T + Send + Sync + 'static,
        df: impl Fn(T) -> T + Send + Sync + 'static,
        d2f: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { f: Arc::new(f), df: Arc::new(df), d2f: Arc::new(d2f) }
    }
}

impl<T: Real> Smooth<T> for FnSmooth<T> {
    fn value(&self, u: T) -> T {
        (self.f)(u)
    }
    fn derivative(&self, u: T) -> T {
        (self.df)(u)
    }
    fn second_derivative(&self, u: T) -> T {
        (self.d2f)(u)
    }
}

/// Complex trigonometric polynomial `re(u) + i·im(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTrig<T> {
    pub re: TrigPoly<T>,
    pub im: TrigPoly<T>,
}

impl<T: Real> ComplexTrig<T> {
    pub fn real(re: TrigPoly<T>) -> Self {
        Self { re, im: TrigPoly::zero() }
    }

    pub fn zero() -> Self {
        Self::real(TrigPoly::zero())
    }

    pub fn eval(&self, u: T) -> Complex<T> {
        Complex::new(self.re.value(u), self.im.value(u))
    }

    pub fn is_zero(&self) -> bool {
        self.re.sup_bound().is_zero() && self.im.sup_bound().is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_matches_pointwise() {
        let p = TrigPoly::new(0.3, vec![1.0, -0.5], vec![0.2, 0.0, 0.7]);
        let q = TrigPoly::new(-1.0, vec![0.0, 2.0], vec![0.4]);
        let pq = p.mul(&q);
        assert_eq!(pq.degree(), 5);
        for k in 0..20 {
            let u = 0.31 * k as f64;
            assert_abs_diff_eq!(pq.value(u), p.value(u) * q.value(u), epsilon = 1e-12);
        }
    }

    #[test]
    fn derivatives_match_closed_forms() {
        let p = TrigPoly::new(0.5, vec![1.0, 0.0, -2.0], vec![0.0, 3.0]);
        let u = 0.7_f64;
        let f = |u: f64| 0.5 + u.cos() - 2.0 * (3.0 * u).cos() + 3.0 * (2.0 * u).sin();
        let df = |u: f64| -u.sin() + 6.0 * (3.0 * u).sin() + 6.0 * (2.0 * u).cos();
        let d2f = |u: f64| -u.cos() + 18.0 * (3.0 * u).cos() - 12.0 * (2.0 * u).sin();
        assert_abs_diff_eq!(p.value(u), f(u), epsilon = 1e-13);
        assert_abs_diff_eq!(p.derivative(u), df(u), epsilon = 1e-13);
        assert_abs_diff_eq!(p.second_derivative(u), d2f(u), epsilon = 1e-12);
        assert_abs_diff_eq!(p.derivative_poly(2).value(u), d2f(u), epsilon = 1e-12);
        assert_abs_diff_eq!(p.derivative_poly(3).value(u), p.eval_derivative(3, u), epsilon = 1e-11);
    }

    #[test]
    fn inner_product_matches_riemann_sum() {
        let p = TrigPoly::new(0.3, vec![1.0, 0.5], vec![0.2]);
        let q = TrigPoly::new(-1.0, vec![0.0, 2.0], vec![1.5, 0.1]);
        let n = 64;
        let h = std::f64::consts::TAU / n as f64;
        let sum: f64 = (0..n).map(|j| p.value(j as f64 * h) * q.value(j as f64 * h) * h).sum();
        assert_abs_diff_eq!(p.inner(&q), sum, epsilon = 1e-12);
    }
}
