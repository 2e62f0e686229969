//! Path and loop groups of the ax+b group and the central extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::smooth::{Smooth, TrigPoly};

/// `α(u) = slope·u + p(u)` with `p` a trigonometric polynomial; periodic iff `slope = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFn<T> {
    pub slope: T,
    pub trig: TrigPoly<T>,
}

impl<T: Real> AlphaFn<T> {
    pub fn zero() -> Self {
        Self { slope: T::zero(), trig: TrigPoly::zero() }
    }

    pub fn periodic(trig: TrigPoly<T>) -> Self {
        Self { slope: T::zero(), trig }
    }

    pub fn is_periodic(&self) -> bool {
        self.slope.is_zero()
    }

    pub fn at_start(&self) -> T {
        self.trig.value(T::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { slope: self.slope + other.slope, trig: self.trig.add(&other.trig) }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { slope: self.slope * s, trig: self.trig.scale(s) }
    }

    /// `α̃ = α − α(0)`.
    pub fn based(&self) -> Self {
        let mut trig = self.trig.clone();
        trig.constant = trig.constant - self.at_start();
        Self { slope: self.slope, trig }
    }

    /// `∫₀^{2π} α′β′ du`.
    pub fn derivative_inner(&self, other: &Self) -> T {
        T::TAU() * self.slope * other.slope + self.trig.derivative_poly(1).inner(&other.trig.derivative_poly(1))
    }

    /// `∫₀^{2π} α β′ du`, using `∫ u q′ = 2π q(0) − ∫ q` for the periodic part.
    pub fn pair_with_derivative(&self, other: &Self) -> T {
        let tau = T::TAU();
        let (p, q) = (&self.trig, &other.trig);
        self.slope * other.slope * tau * tau / T::lit(2.0)
            + self.slope * (tau * q.value(T::zero()) - q.integral())
            + other.slope * p.integral()
            + p.inner(&q.derivative_poly(1))
    }
}

impl<T: Real> Smooth<T> for AlphaFn<T> {
    fn value(&self, u: T) -> T {
        self.slope * u + self.trig.value(u)
    }
    fn derivative(&self, u: T) -> T {
        self.slope + self.trig.derivative(u)
    }
    fn second_derivative(&self, u: T) -> T {
        self.trig.second_derivative(u)
    }
}

/// The translation part `b`, closed under `b ↦ e^{α₁}b₂ + b₁` and `b ↦ −e^{−α}b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BFn<T> {
    Trig(TrigPoly<T>),
    /// `scale · e^{α} · inner`.
    Twisted {
        alpha: AlphaFn<T>,
        scale: T,
        inner: Box<BFn<T>>,
    },
    Sum(Box<BFn<T>>, Box<BFn<T>>),
}

impl<T: Real> BFn<T> {
    pub fn zero() -> Self {
        Self::Trig(TrigPoly::zero())
    }

    pub fn value(&self, u: T) -> T {
        match self {
            Self::Trig(p) => p.value(u),
            Self::Twisted { alpha, scale, inner } => *scale * alpha.value(u).exp() * inner.value(u),
            Self::Sum(a, b) => a.value(u) + b.value(u),
        }
    }

    /// Signs of `b` on `samples + 1` equispaced points: `Some(1)` all positive, `Some(-1)` all
    /// negative, `None` otherwise.
    pub fn strict_sign(&self, samples: usize) -> Option<i8> {
        let step = T::TAU() / T::from_usize_lossy(samples);
        let values = (0..=samples).map(|j| self.value(step * T::from_usize_lossy(j)));
        let (mut pos, mut neg) = (true, true);
        for v in values {
            pos &= v > T::zero();
            neg &= v < T::zero();
        }
        match (pos, neg) {
            (true, _) => Some(1),
            (_, true) => Some(-1),
            _ => None,
        }
    }
}

/// Which subgroup of the path group an element must belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgroup {
    /// `PG`: arbitrary α, b.
    Path,
    /// `P₀G`: α(0) = 0.
    BasedPath,
    /// `ΩG`: α, b periodic.
    Loop,
    /// `Ω₀G`: periodic and based.
    BasedLoop,
    /// `Ĝ`: periodic with central coordinate.
    Extended,
    /// `Ĝ₀`: based, periodic, with central coordinate.
    BasedExtended,
}

impl Subgroup {
    pub fn based(self) -> bool {
        matches!(self, Self::BasedPath | Self::BasedLoop | Self::BasedExtended)
    }
    pub fn periodic(self) -> bool {
        !matches!(self, Self::Path | Self::BasedPath)
    }
    pub fn extended(self) -> bool {
        matches!(self, Self::Extended | Self::BasedExtended)
    }
}

/// `g(e^α, b, s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopElement<T> {
    pub alpha: AlphaFn<T>,
    pub b: BFn<T>,
    pub s: T,
}

impl<T: Real> LoopElement<T> {
    pub fn identity() -> Self {
        Self { alpha: AlphaFn::zero(), b: BFn::zero(), s: T::zero() }
    }

    /// Periodic element from Fourier data.
    pub fn from_trig(alpha: TrigPoly<T>, b: TrigPoly<T>, s: T) -> Self {
        Self { alpha: AlphaFn::periodic(alpha), b: BFn::Trig(b), s }
    }
}

/// A subgroup together with the central charge of its cocycle `c(α₁, α₂) = k∫α₁α₂′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopGroup<T> {
    pub subgroup: Subgroup,
    pub k: T,
}

impl<T: Real> LoopGroup<T> {
    pub fn new(subgroup: Subgroup, k: T) -> Self {
        Self { subgroup, k }
    }

    pub fn cocycle(&self, a1: &AlphaFn<T>, a2: &AlphaFn<T>) -> T {
        self.k * a1.pair_with_derivative(a2)
    }

    pub fn check(&self, h: &LoopElement<T>) -> Result<()> {
        let tol = |scale: T| T::lit(1e-12) * (T::one() + scale);
        if self.subgroup.based() && h.alpha.at_start().abs() > tol(h.alpha.trig.sup_bound()) {
            return Err(Error::Constraint(format!("α(0) = {} for a based subgroup", h.alpha.at_start())));
        }
        if self.subgroup.periodic() {
            if !h.alpha.is_periodic() {
                return Err(Error::Constraint("α is not periodic".into()));
            }
            let (b0, b1) = (h.b.value(T::zero()), h.b.value(T::TAU()));
            if (b0 - b1).abs() > T::lit(1e-10) * (T::one() + b0.abs()) {
                return Err(Error::Constraint(format!("b(0) = {b0} differs from b(2π) = {b1}")));
            }
        }
        if !self.subgroup.extended() && !h.s.is_zero() {
            return Err(Error::Constraint("central coordinate outside the extended group".into()));
        }
        Ok(())
    }

    /// `(α₁+α₂, e^{α₁}b₂ + b₁, s₁ + s₂ + k∫α₁α₂′)`.
    pub fn mul(&self, h1: &LoopElement<T>, h2: &LoopElement<T>) -> Result<LoopElement<T>> {
        self.check(h1)?;
        self.check(h2)?;
        let s = if self.subgroup.extended() { h1.s + h2.s + self.cocycle(&h1.alpha, &h2.alpha) } else { T::zero() };
        Ok(LoopElement {
            alpha: h1.alpha.add(&h2.alpha),
            b: BFn::Sum(
                Box::new(BFn::Twisted { alpha: h1.alpha.clone(), scale: T::one(), inner: Box::new(h2.b.clone()) }),
                Box::new(h1.b.clone()),
            ),
            s,
        })
    }

    pub fn inverse(&self, h: &LoopElement<T>) -> Result<LoopElement<T>> {
        self.check(h)?;
        let s = if self.subgroup.extended() { -h.s + self.cocycle(&h.alpha, &h.alpha) } else { T::zero() };
        let alpha = h.alpha.scale(-T::one());
        Ok(LoopElement { b: BFn::Twisted { alpha: alpha.clone(), scale: -T::one(), inner: Box::new(h.b.clone()) }, alpha, s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn exact_integrals_match_quadrature() {
        let a = AlphaFn { slope: 0.3, trig: TrigPoly::new(0.2, vec![1.0, -0.4], vec![0.5]) };
        let b = AlphaFn { slope: -0.7, trig: TrigPoly::new(-0.1, vec![0.0, 0.3], vec![0.0, 0.9]) };
        let tau = std::f64::consts::TAU;
        let pair = quad::adaptive(|u: f64| a.value(u) * b.derivative(u), 0.0, tau, 1e-13).unwrap();
        let dd = quad::adaptive(|u: f64| a.derivative(u) * b.derivative(u), 0.0, tau, 1e-13).unwrap();
        assert!((a.pair_with_derivative(&b) - pair).abs() < 1e-11);
        assert!((a.derivative_inner(&b) - dd).abs() < 1e-11);
    }

    #[test]
    fn constraints_are_enforced() {
        let g = LoopGroup::new(Subgroup::BasedLoop, 0.0);
        let based = LoopElement::from_trig(TrigPoly::sin_mode(1, 1.0), TrigPoly::constant(1.0), 0.0);
        assert!(g.check(&based).is_ok());
        let unbased = LoopElement::from_trig(TrigPoly::cos_mode(1, 1.0), TrigPoly::zero(), 0.0);
        assert!(g.check(&unbased).is_err());
        let open = LoopElement { alpha: AlphaFn { slope: 1.0, trig: TrigPoly::zero() }, b: BFn::zero(), s: 0.0 };
        assert!(LoopGroup::new(Subgroup::Loop, 0.0).check(&open).is_err());
        assert!(LoopGroup::new(Subgroup::Path, 0.0).check(&open).is_ok());
        let open_b = LoopElement { alpha: AlphaFn::zero(), b: BFn::Trig(TrigPoly::constant(1.0)), s: 0.0 };
        let twisted = LoopGroup::new(Subgroup::Path, 0.0).mul(&open, &open_b).unwrap();
        assert!(LoopGroup::new(Subgroup::Loop, 0.0).check(&twisted).is_err());
        let central = LoopElement::from_trig(TrigPoly::zero(), TrigPoly::zero(), 1.0);
        assert!(LoopGroup::new(Subgroup::Loop, 0.0).check(&central).is_err());
    }

    #[test]
    fn inverse_is_two_sided() {
        let g = LoopGroup::new(Subgroup::Extended, 0.7_f64);
        let h = LoopElement::from_trig(TrigPoly::new(0.3, vec![0.5], vec![-0.2]), TrigPoly::new(1.0, vec![], vec![0.4]), 2.0);
        let hinv = g.inverse(&h).unwrap();
        for e in [g.mul(&h, &hinv).unwrap(), g.mul(&hinv, &h).unwrap()] {
            assert!(e.s.abs() < 1e-14);
            for j in 0..10 {
                let u = 0.6 * j as f64;
                assert!(e.alpha.value(u).abs() < 1e-14);
                assert!(e.b.value(u).abs() < 1e-14);
            }
        }
    }
}
