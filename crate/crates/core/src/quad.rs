//! Quadrature rules shared by the numeric modules.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Integrand values: real or complex scalars.
pub trait Value<T>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> Value<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Value<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid<T: Real, V: Value<T>>(f: impl Fn(T) -> V, a: T, b: T, n: usize) -> V {
    let h = (b - a) / T::from_usize_lossy(n);
    let half = T::lit(0.5);
    let mut acc = (f(a) + f(b)) * half;
    for j in 1..n {
        acc = acc + f(a + h * T::from_usize_lossy(j));
    }
    acc * h
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<T: Real, V: Value<T>>(f: impl Fn(T) -> V, a: T, b: T, n: usize) -> V {
    let n = n + n % 2;
    let h = (b - a) / T::from_usize_lossy(n);
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc = acc + f(a + h * T::from_usize_lossy(j)) * w;
    }
    acc * (h / T::lit(3.0))
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const G7_WEIGHTS: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gauss_kronrod<T: Real, V: Value<T>>(f: &impl Fn(T) -> V, a: T, b: T) -> (V, T) {
    let c = (a + b) * T::lit(0.5);
    let r = (b - a) * T::lit(0.5);
    let center = f(c);
    let mut kronrod = center * T::lit(K15_WEIGHTS[7]);
    let mut gauss = center * T::lit(G7_WEIGHTS[3]);
    for (i, &x) in GK_NODES[..7].iter().enumerate() {
        let dx = r * T::lit(x);
        let pair = f(c - dx) + f(c + dx);
        kronrod = kronrod + pair * T::lit(K15_WEIGHTS[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(G7_WEIGHTS[i / 2]);
        }
    }
    (kronrod * r, (kronrod - gauss).magnitude() * r.abs())
}

struct Piece<T, V> {
    lo: T,
    hi: T,
    value: V,
    err: T,
}

impl<T: Real, V> PartialEq for Piece<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T: Real, V> Eq for Piece<T, V> {}
impl<T: Real, V> PartialOrd for Piece<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Piece<T, V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive<T: Real, V: Value<T>>(f: impl Fn(T) -> V, a: T, b: T, tol: T) -> Result<V> {
    adaptive_with_breaks(f, &[a, b], tol)
}

/// Adaptive quadrature over consecutive panels `[p₀, p₁], [p₁, p₂], …`.
///
/// Breakpoints at known narrow features keep the initial rule from stepping over them.
pub fn adaptive_with_breaks<T: Real, V: Value<T>>(f: impl Fn(T) -> V, points: &[T], tol: T) -> Result<V> {
    const MAX_INTERVALS: usize = 50_000;
    let mut heap = std::collections::BinaryHeap::new();
    let mut total_err = T::zero();
    for w in points.windows(2) {
        let (value, err) = gauss_kronrod(&f, w[0], w[1]);
        total_err = total_err + err;
        heap.push(Piece { lo: w[0], hi: w[1], value, err });
    }
    while total_err > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "error estimate {:.3e} above tolerance {:.3e}",
                total_err.to_f64_lossy(),
                tol.to_f64_lossy()
            )));
        }
        let worst = heap.pop().expect("non-empty");
        let mid = (worst.lo + worst.hi) * T::lit(0.5);
        let (lv, le) = gauss_kronrod(&f, worst.lo, mid);
        let (rv, re) = gauss_kronrod(&f, mid, worst.hi);
        heap.push(Piece { lo: worst.lo, hi: mid, value: lv, err: le });
        heap.push(Piece { lo: mid, hi: worst.hi, value: rv, err: re });
        total_err = total_err - worst.err + le + re;
        if total_err <= tol {
            total_err = heap.iter().fold(T::zero(), |acc, p| acc + p.err);
        }
    }
    Ok(heap.iter().fold(V::zero(), |acc, p| acc + p.value))
}
