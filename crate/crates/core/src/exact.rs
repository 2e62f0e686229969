//! Exact Gaussian-rational arithmetic, sums of exponentials and first-order jets.
//!
//! Correlators of regularized currents at rational points are finite sums `Σ c·exp(q)` with
//! Gaussian-rational `c` and `q`; [`ExpSum`] stores them in canonical form so two independent
//! evaluations can be compared for equality.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Gaussian rational `a + ib`, `a, b ∈ ℚ`.
pub type QI = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(re: BigRational, im: BigRational) -> QI {
    Complex::new(re, im)
}

/// Rational point `r · (a + ib)/c` with `a² + b² = c²`, so `|z| = r` exactly.
pub fn rational_point(r: BigRational, a: i64, b: i64, c: i64) -> crate::Result<QI> {
    if a * a + b * b != c * c {
        return Err(crate::error::invalid("point", format!("({a}, {b}, {c}) is not a Pythagorean triple")));
    }
    Ok(qi(r.clone() * rat(a, c), r * rat(b, c)))
}

pub fn qi_to_f64(z: &QI) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// Scalars the correlator evaluators run over: `Complex<f64>` numerically, [`QI`] exactly.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn i() -> Self;
    fn conj(&self) -> Self;
    fn from_qi(z: &QI) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn powu(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * self.clone())
    }
}

impl Field for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_qi(z: &QI) -> Self {
        qi_to_f64(z)
    }
}

impl Field for QI {
    fn from_ratio(num: i64, den: i64) -> Self {
        qi(rat(num, den), BigRational::zero())
    }

    fn i() -> Self {
        qi(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_qi(z: &QI) -> Self {
        z.clone()
    }
}

/// Finite sum `Σ_q c_q · exp(q)` keyed by the exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpSum {
    terms: BTreeMap<(BigRational, BigRational), QI>,
}

impl ExpSum {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `coeff · exp(exponent)`.
    pub fn term(coeff: QI, exponent: QI) -> Self {
        let mut s = Self::zero();
        s.add_term(coeff, exponent);
        s
    }

    pub fn add_term(&mut self, coeff: QI, exponent: QI) {
        if coeff.is_zero() {
            return;
        }
        let key = (exponent.re, exponent.im);
        let slot = self.terms.entry(key.clone()).or_insert_with(QI::zero);
        *slot = slot.clone() + coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &ExpSum) {
        for ((re, im), c) in &other.terms {
            self.add_term(c.clone(), qi(re.clone(), im.clone()));
        }
    }

    pub fn scale(&self, s: &QI) -> Self {
        let mut out = Self::zero();
        for ((re, im), c) in &self.terms {
            out.add_term(c.clone() * s.clone(), qi(re.clone(), im.clone()));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(exponent, coefficient)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (QI, &QI)> {
        self.terms.iter().map(|((re, im), c)| (qi(re.clone(), im.clone()), c))
    }

    pub fn to_f64(&self) -> Complex64 {
        self.iter().map(|(q, c)| qi_to_f64(c) * qi_to_f64(&q).exp()).sum()
    }

    /// Largest absolute numerator/denominator bit length, a size diagnostic.
    pub fn max_bits(&self) -> u64 {
        self.terms.values().flat_map(|c| [&c.re, &c.im]).map(|r| r.numer().abs().bits().max(r.denom().bits())).max().unwrap_or(0)
    }
}

/// Multilinear jet in `d` nilpotent directions `ε_k` with `ε_k² = 0`.
///
/// Component `mask` is the coefficient of `Π_{k ∈ mask} ε_k`; the top component is the mixed
/// first derivative in every direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    dirs: u32,
    coeffs: Vec<T>,
}

impl<T: Field> Jet<T> {
    pub fn constant(dirs: u32, value: T) -> Self {
        let mut coeffs = vec![T::zero(); 1 << dirs];
        coeffs[0] = value;
        Self { dirs, coeffs }
    }

    /// `value + slope · ε_dir`.
    pub fn linear(dirs: u32, value: T, dir: u32, slope: T) -> Self {
        let mut j = Self::constant(dirs, value);
        j.coeffs[1 << dir] = slope;
        j
    }

    pub fn dirs(&self) -> u32 {
        self.dirs
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    pub fn coeff(&self, mask: usize) -> &T {
        &self.coeffs[mask]
    }

    pub fn top(&self) -> &T {
        &self.coeffs[self.coeffs.len() - 1]
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { dirs: self.dirs, coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dirs: self.dirs, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { dirs: self.dirs, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![T::zero(); n];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let free = (n - 1) & !a;
            // Iterate over all submasks b of the complement of a.
            let mut b = free;
            loop {
                let cb = &other.coeffs[b];
                if !cb.is_zero() {
                    out[a | b] = out[a | b].clone() + ca.clone() * cb.clone();
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & free;
            }
        }
        Self { dirs: self.dirs, coeffs: out }
    }

    pub fn powu(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(self.dirs, T::one()), |acc, _| acc.mul(self))
    }

    /// Nilpotent part (value component cleared).
    fn nilpotent(&self) -> Self {
        let mut n = self.clone();
        n.coeffs[0] = T::zero();
        n
    }

    pub fn recip(&self) -> Self {
        // 1/(a + n) = a⁻¹ Σ_k (−n/a)^k, terminating after `dirs` steps.
        let a_inv = T::one() / self.value().clone();
        let step = self.nilpotent().scale(&(-a_inv.clone()));
        let mut term = Self::constant(self.dirs, T::one());
        let mut sum = term.clone();
        for _ in 0..self.dirs {
            term = term.mul(&step);
            sum = sum.add(&term);
        }
        sum.scale(&a_inv)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// `exp(self) = exp(value) · factor`; returns `(value, factor)` so exact callers keep the
    /// transcendental part symbolic.
    pub fn exp_split(&self) -> (T, Self) {
        let n = self.nilpotent();
        let mut term = Self::constant(self.dirs, T::one());
        let mut sum = term.clone();
        for k in 1..=self.dirs {
            term = term.mul(&n).scale(&(T::one() / T::from_int(k as i64)));
            sum = sum.add(&term);
        }
        (self.value().clone(), sum)
    }
}
