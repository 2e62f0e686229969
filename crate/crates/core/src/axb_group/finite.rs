//! The ax+b group, its induced representation on `L²(ℝ, dt)`, the bilateral Laplace transform
//! and the Γ-kernel form of the conjugated representation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gamma_suite::gamma_lanczos;
use crate::quad;
use crate::scalar::Real;

/// `g(a, b)`: the map `x ↦ a x + b` with `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElementG<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> GroupElementG<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero()) || !b.is_finite() {
            return Err(invalid("a", "must be positive with finite b"));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero() }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.a.recip(), b: -self.b / self.a }
    }

    /// `α = ln a`, the dilation exponent.
    pub fn log_a(&self) -> T {
        self.a.ln()
    }
}

/// `(a₁, b₁)(a₂, b₂) = (a₁a₂, a₁b₂ + b₁)`.
pub fn mul_g<T: Real>(g1: GroupElementG<T>, g2: GroupElementG<T>) -> GroupElementG<T> {
    GroupElementG { a: g1.a * g2.a, b: g1.a * g2.b + g1.b }
}

/// Complex samples `f(t₀ + j·step)`, zero outside the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFn<T> {
    pub t0: T,
    pub step: T,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> SampledFn<T> {
    pub fn from_fn(t0: T, step: T, len: usize, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = (0..len).map(|j| f(t0 + step * T::from_usize_lossy(j))).collect();
        Self { t0, step, values }
    }

    pub fn node(&self, j: usize) -> T {
        self.t0 + self.step * T::from_usize_lossy(j)
    }

    /// Discrete `∫|f|² dt`.
    pub fn norm_sqr(&self) -> T {
        self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * self.step
    }

    /// Index of `t` on this grid, if it is a node.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let x = (t - self.t0) / self.step;
        let j = x.round();
        ((x - j).abs() < T::lit(1e-9) && j >= T::zero()).then(|| j.to_usize()).flatten()
    }
}

/// Smooth compactly supported bump `exp(−1/(1 − ((t − c)/w)²))`.
pub fn bump<T: Real>(center: T, width: T) -> impl Fn(T) -> T {
    move |t| {
        let y = (t - center) / width;
        if y.abs() < T::one() {
            (-(T::one() - y * y).recip()).exp()
        } else {
            T::zero()
        }
    }
}

/// `(R_λ(g)f)(t) = e^{λ b eᵗ} f(t + ln a)`.
///
/// The dilation must be a whole number of grid steps; the result lives on the part of the grid
/// whose shifted nodes stay inside the window.
pub fn act_r_lambda<T: Real>(g: GroupElementG<T>, lambda: Complex<T>, f: &SampledFn<T>) -> Result<SampledFn<T>> {
    let shift = g.log_a();
    let steps = shift / f.step;
    let m = steps.round();
    if (steps - m).abs() > T::lit(1e-9) * T::one().max(steps.abs()) {
        return Err(Error::OffGridShift { shift: shift.to_f64_lossy(), step: f.step.to_f64_lossy() });
    }
    let n = f.values.len() as i64;
    let m = m.to_i64().ok_or(Error::ShiftOutOfRange)?;
    let (start, end) = (0.max(-m), n.min(n - m));
    if start >= end {
        return Err(Error::ShiftOutOfRange);
    }
    let t0 = f.node(start as usize);
    let values = (start..end)
        .map(|j| {
            let t = f.node(j as usize);
            let v = f.values[(j + m) as usize];
            // Combine in the exponent so that a growing multiplier meets a decaying tail finitely.
            if v.norm_sqr().is_zero() {
                v
            } else {
                (lambda * (g.b * t.exp()) + v.ln()).exp()
            }
        })
        .collect();
    Ok(SampledFn { t0, step: f.step, values })
}

/// `𝓛f(p) = (2π)^{−½} ∫ e^{ipt} f(t) dt` of a sampled, compactly supported function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceImage<T> {
    pub source: SampledFn<T>,
}

impl<T: Real> LaplaceImage<T> {
    pub fn new(source: SampledFn<T>) -> Self {
        Self { source }
    }

    /// Trapezoid sum; spectrally accurate for smooth functions vanishing at the window ends.
    pub fn eval(&self, p: Complex<T>) -> Complex<T> {
        let f = &self.source;
        let i = Complex::new(T::zero(), T::one());
        let last = f.values.len().saturating_sub(1);
        let sum = f.values.iter().enumerate().fold(Complex::new(T::zero(), T::zero()), |acc, (j, &v)| {
            let w = if j == 0 || j == last { T::lit(0.5) } else { T::one() };
            acc + (i * p * f.node(j)).exp() * v * w
        });
        sum * (f.step / T::TAU().sqrt())
    }
}

/// Laplace transform at the points `ps`.
pub fn laplace<T: Real>(f: &SampledFn<T>, ps: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let image = LaplaceImage::new(f.clone());
    ps.iter()
        .map(|&p| {
            let v = image.eval(p);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::Quadrature(format!("Laplace integral diverges at p = {p}")))
            }
        })
        .collect()
}

/// Truncation of the inverse transform contour `ℝ + iT` to `|Re p| ≤ cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseContour<T> {
    pub height: T,
    pub cutoff: T,
    pub step: T,
}

impl Default for InverseContour<f64> {
    fn default() -> Self {
        Self { height: 0.0, cutoff: 100.0, step: 0.1 }
    }
}

/// `𝓛⁻¹g(t) = (2π)^{−½} ∫_{ℝ+iT} e^{−ipt} g(p) dp` at the points `ts`.
pub fn inverse_laplace<T: Real>(g: impl Fn(Complex<T>) -> Complex<T>, contour: InverseContour<T>, ts: &[T]) -> Result<Vec<Complex<T>>> {
    if !(contour.cutoff > T::zero() && contour.step > T::zero()) {
        return Err(invalid("contour", "cutoff and step must be positive"));
    }
    let n = (T::lit(2.0) * contour.cutoff / contour.step).ceil().to_usize().unwrap_or(0).max(2);
    let ds = T::lit(2.0) * contour.cutoff / T::from_usize_lossy(n);
    let i = Complex::new(T::zero(), T::one());
    let samples: Vec<(Complex<T>, Complex<T>)> = (0..=n)
        .map(|j| {
            let p = Complex::new(-contour.cutoff + ds * T::from_usize_lossy(j), contour.height);
            let w = if j == 0 || j == n { T::lit(0.5) } else { T::one() };
            (p, g(p) * w)
        })
        .collect();
    ts.iter()
        .map(|&t| {
            let sum = samples.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &(p, gp)| acc + (-i * p * t).exp() * gp);
            let v = sum * (ds / T::TAU().sqrt());
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::Quadrature(format!("inverse Laplace integral diverges at t = {t}")))
            }
        })
        .collect()
}

/// Smallest admissible distance of the contour from the Γ pole at `p = t₁`.
pub const MIN_CONTOUR_OFFSET: f64 = 1e-3;

/// Contour offsets combined by Richardson extrapolation.
pub const RICHARDSON_OFFSETS: [f64; 3] = [0.1, 0.05, 0.025];

/// Half-width of the integration window around `t₁`; the Γ factor decays like `e^{−π|s−t₁|/2}`.
const KERNEL_HALF_WIDTH: f64 = 40.0;

fn check_kernel_inputs<T: Real>(g: GroupElementG<T>, lambda: T) -> Result<T> {
    if !(g.b > T::zero()) {
        return Err(invalid("g", "the Γ-kernel needs b > 0"));
    }
    if !(lambda < T::zero()) {
        return Err(invalid("lambda", "the Γ-kernel needs λ < 0"));
    }
    Ok(-lambda * g.b)
}

/// `(2π)^{−1} ∫_{ℝ+iε} Γ(i(t₁−p)) (−λb)^{i(p−t₁)} a^{−ip} f(p) dp`.
pub fn gamma_kernel_apply<T: Real>(
    g: GroupElementG<T>,
    lambda: T,
    f: &impl Fn(Complex<T>) -> Complex<T>,
    t1: T,
    epsilon: T,
) -> Result<Complex<T>> {
    let threshold = T::lit(MIN_CONTOUR_OFFSET);
    if !(epsilon >= threshold) {
        return Err(Error::ContourTooClose { epsilon: epsilon.to_f64_lossy(), threshold: MIN_CONTOUR_OFFSET });
    }
    let c = check_kernel_inputs(g, lambda)?;
    let (ln_c, ln_a) = (c.ln(), g.log_a());
    let i = Complex::new(T::zero(), T::one());
    let integrand = |s: T| {
        let p = Complex::new(s, epsilon);
        let gamma = gamma_lanczos(i * (Complex::new(t1, T::zero()) - p));
        let phase = (i * (p - t1) * ln_c - i * p * ln_a).exp();
        gamma * phase * f(p) / T::TAU()
    };
    let half = T::lit(KERNEL_HALF_WIDTH);
    let mut points = vec![t1 - half, t1 + half];
    for d in [T::one(), T::lit(4.0), T::lit(12.0), epsilon, T::lit(4.0) * epsilon] {
        points.push(t1 - d);
        points.push(t1 + d);
    }
    points.push(t1);
    points.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    points.dedup();
    quad::adaptive_with_breaks(integrand, &points, T::lit(1e-11))
}

/// Kernel values at the Richardson offsets and their extrapolation to `ε → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelValue<T> {
    pub value: Complex<T>,
    pub by_offset: Vec<(T, Complex<T>)>,
}

pub fn gamma_kernel_extrapolated<T: Real>(
    g: GroupElementG<T>,
    lambda: T,
    f: &impl Fn(Complex<T>) -> Complex<T>,
    t1: T,
) -> Result<KernelValue<T>> {
    let by_offset = RICHARDSON_OFFSETS
        .iter()
        .map(|&e| gamma_kernel_apply(g, lambda, f, t1, T::lit(e)).map(|v| (T::lit(e), v)))
        .collect::<Result<Vec<_>>>()?;
    // Halving offsets: remove the O(ε) term, then the O(ε²) term.
    let two = T::lit(2.0);
    let r1: Vec<Complex<T>> = by_offset.windows(2).map(|w| w[1].1 * two - w[0].1).collect();
    let value = (r1[1] * T::lit(4.0) - r1[0]) / T::lit(3.0);
    Ok(KernelValue { value, by_offset })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_examples() {
        let g = mul_g(GroupElementG::new(1.0, 2.0).unwrap(), GroupElementG::new(1.0, -0.5).unwrap());
        assert_eq!(g, GroupElementG { a: 1.0, b: 1.5 });
        let g = mul_g(GroupElementG::new(3.0, 0.0).unwrap(), GroupElementG::new(1.0, 2.0).unwrap());
        assert_eq!(g, GroupElementG { a: 3.0, b: 6.0 });
        let h = GroupElementG::new(4.0, -1.0).unwrap();
        assert_eq!(mul_g(h, h.inverse()), GroupElementG::identity());
        assert!(GroupElementG::new(0.0, 1.0).is_err());
    }

    #[test]
    fn shifts_must_be_on_grid() {
        let f = SampledFn::from_fn(-5.0, 0.1, 101, |t: f64| Complex::new((-t * t).exp(), 0.0));
        let g = GroupElementG::new(0.35_f64.exp(), 0.0).unwrap();
        assert!(matches!(act_r_lambda(g, Complex::new(0.0, 1.0), &f), Err(Error::OffGridShift { .. })));
        let far = GroupElementG::new(20.0_f64.exp(), 0.0).unwrap();
        assert_eq!(act_r_lambda(far, Complex::new(0.0, 1.0), &f), Err(Error::ShiftOutOfRange));
        let same = act_r_lambda(GroupElementG::identity(), Complex::new(0.0, 1.0), &f).unwrap();
        assert_eq!(same, f);
    }

    #[test]
    fn contour_offset_threshold() {
        let g = GroupElementG::new(1.0, 1.0).unwrap();
        let f = |_: Complex<f64>| Complex::new(0.0, 0.0);
        assert!(matches!(gamma_kernel_apply(g, -1.0, &f, 0.0, 1e-4), Err(Error::ContourTooClose { .. })));
        assert!(gamma_kernel_apply(g, 1.0, &f, 0.0, 0.1).is_err());
    }
}
