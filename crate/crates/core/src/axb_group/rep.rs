//! The representation of the extended loop group on functionals of based loops and a zero mode.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::loop_group::{AlphaFn, LoopElement};
use crate::error::{invalid, Error, Result};
use crate::mc::{self, McEstimate};
use crate::scalar::Real;
use crate::smooth::{ComplexTrig, Smooth};
use crate::wiener::{draw_bridge, Grid, Path};

/// Which multipliers `e^{∫λ b e^{x+x₀}}` are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `λ ∈ iℝ`: every multiplier is a phase.
    Unitary,
    /// `Re λ` of one sign, `b` of the opposite sign: every multiplier is a contraction.
    Semigroup,
}

/// Sample count used to check sign conditions on `[0, 2π]`.
const SIGN_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepParams<T> {
    pub lambda: ComplexTrig<T>,
    /// Central charge of the represented extended group.
    pub k: T,
    /// Wiener variance.
    pub t: T,
    pub regime: Regime,
}

impl<T: Real> RepParams<T> {
    pub fn new(lambda: ComplexTrig<T>, k: T, t: T, regime: Regime) -> Result<Self> {
        if !(t > T::zero()) {
            return Err(invalid("t", "must be positive"));
        }
        let params = Self { lambda, k, t, regime };
        match regime {
            Regime::Unitary if !params.lambda.re.sup_bound().is_zero() => {
                Err(Error::Regime { regime: "unitary", reason: "λ must be purely imaginary".into() })
            }
            Regime::Semigroup if params.re_lambda_sign().is_none() => {
                Err(Error::Regime { regime: "semigroup", reason: "Re λ must have one strict sign".into() })
            }
            _ => Ok(params),
        }
    }

    fn re_lambda_sign(&self) -> Option<i8> {
        super::loop_group::BFn::Trig(self.lambda.re.clone()).strict_sign(SIGN_SAMPLES)
    }

    fn check_element(&self, h: &LoopElement<T>) -> Result<()> {
        if !h.alpha.is_periodic() {
            return Err(Error::Constraint("α must be periodic to preserve based loops".into()));
        }
        if self.regime == Regime::Semigroup {
            let lam = self.re_lambda_sign().expect("validated on construction");
            match h.b.strict_sign(SIGN_SAMPLES) {
                Some(s) if s == -lam => {}
                _ => return Err(Error::Regime { regime: "semigroup", reason: "b must have the sign opposite to Re λ everywhere".into() }),
            }
        }
        Ok(())
    }
}

/// A based loop `x + σ` given as a sampled bridge plus an exact smooth shift, with the zero mode.
///
/// Keeping the shift exact makes `∫ y d(x + σ) = Σ y Δx + ∫ y σ′` hold identically, so compositions
/// of the action agree with the action of the product to rounding error.
#[derive(Debug, Clone)]
pub struct ShiftedPath<'a, T> {
    pub base: &'a Path<T>,
    pub shift: AlphaFn<T>,
    pub x0: T,
}

impl<'a, T: Real> ShiftedPath<'a, T> {
    pub fn new(base: &'a Path<T>, x0: T) -> Self {
        Self { base, shift: AlphaFn::zero(), x0 }
    }

    pub fn shifted(&self, by: &AlphaFn<T>, x0_by: T) -> Self {
        Self { base: self.base, shift: self.shift.add(by), x0: self.x0 + x0_by }
    }

    pub fn values(&self) -> Vec<T> {
        let grid = self.base.grid;
        self.base.values.iter().zip(grid.nodes()).map(|(&x, u)| x + self.shift.value(u)).collect()
    }

    /// `∫ y d(x + σ)` with `y` sampled at the left nodes.
    pub fn stieltjes(&self, y_nodes: &[T], y: &AlphaFn<T>) -> T {
        self.base.increments().zip(y_nodes).map(|(dx, &y)| y * dx).sum::<T>() + y.pair_with_derivative(&self.shift)
    }
}

/// A functional of `(x, x₀)`.
pub trait LoopFunctional<T: Real>: Sync {
    fn eval(&self, x: &ShiftedPath<'_, T>) -> Complex<T>;
}

/// `exp(∫ x z du + c₁x₀ − c₂x₀²)`, trapezoid rule on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFunctional<T> {
    weighted_z: Vec<Complex<T>>,
    pub x0_linear: Complex<T>,
    pub x0_quadratic: T,
}

impl<T: Real> ExpFunctional<T> {
    pub fn new(z: &ComplexTrig<T>, grid: Grid, x0_linear: Complex<T>, x0_quadratic: T) -> Self {
        let weighted_z = grid.nodes().zip(grid.trapezoid_weights::<T>()).map(|(u, w)| z.eval(u) * w).collect();
        Self { weighted_z, x0_linear, x0_quadratic }
    }
}

impl<T: Real> LoopFunctional<T> for ExpFunctional<T> {
    fn eval(&self, x: &ShiftedPath<'_, T>) -> Complex<T> {
        let linear = x.values().iter().zip(&self.weighted_z).fold(Complex::new(T::zero(), T::zero()), |a, (&v, &z)| a + z * v);
        (linear + self.x0_linear * x.x0 - Complex::new(self.x0_quadratic * x.x0 * x.x0, T::zero())).exp()
    }
}

/// `ρ(h)F` for `h = (e^α, b, s)`:
///
/// `e^{is} e^{−(1/4t)∫α′² − (1/2t)∫α′dx} e^{−ik∫α dx} e^{∫λ b e^{x+x₀}} F(x + α̃, x₀ + α(0))`.
///
/// The central phase carries `−k`, which makes `ρ` a homomorphism for the extended group law with
/// cocycle `k∫α₁α₂′`.
#[derive(Debug, Clone)]
pub struct Acted<T, F> {
    pub element: LoopElement<T>,
    pub params: RepParams<T>,
    pub inner: F,
    grid: Grid,
    based: AlphaFn<T>,
    dalpha: AlphaFn<T>,
    alpha_nodes: Vec<T>,
    dalpha_nodes: Vec<T>,
    /// `w_j λ(u_j) b(u_j)`.
    lambda_b: Vec<Complex<T>>,
    energy: T,
}

pub fn act_rho<T: Real, F: LoopFunctional<T>>(
    element: &LoopElement<T>,
    params: &RepParams<T>,
    grid: Grid,
    inner: F,
) -> Result<Acted<T, F>> {
    params.check_element(element)?;
    let alpha = &element.alpha;
    let nodes: Vec<T> = grid.nodes().collect();
    let lambda_b =
        nodes.iter().zip(grid.trapezoid_weights::<T>()).map(|(&u, w)| params.lambda.eval(u) * (element.b.value(u) * w)).collect();
    Ok(Acted {
        grid,
        based: alpha.based(),
        dalpha: AlphaFn::periodic(alpha.trig.derivative_poly(1)),
        alpha_nodes: nodes.iter().map(|&u| alpha.value(u)).collect(),
        dalpha_nodes: nodes.iter().map(|&u| alpha.derivative(u)).collect(),
        lambda_b,
        energy: alpha.derivative_inner(alpha),
        element: element.clone(),
        params: params.clone(),
        inner,
    })
}

impl<T: Real, F: LoopFunctional<T>> Acted<T, F> {
    /// The multiplier in front of `F(x + α̃, x₀ + α(0))`.
    pub fn prefactor(&self, x: &ShiftedPath<'_, T>) -> Complex<T> {
        let (t, k) = (self.params.t, self.params.k);
        let girsanov = -self.energy / (T::lit(4.0) * t) - x.stieltjes(&self.dalpha_nodes, &self.dalpha) / (T::lit(2.0) * t);
        let phase = self.element.s - k * x.stieltjes(&self.alpha_nodes, &self.element.alpha);
        let multiplier =
            x.values().iter().zip(&self.lambda_b).fold(Complex::new(T::zero(), T::zero()), |acc, (&v, &lb)| acc + lb * (v + x.x0).exp());
        (Complex::new(girsanov, phase) + multiplier).exp()
    }
}

impl<T: Real, F: LoopFunctional<T>> LoopFunctional<T> for Acted<T, F> {
    fn eval(&self, x: &ShiftedPath<'_, T>) -> Complex<T> {
        debug_assert_eq!(x.base.grid, self.grid);
        let moved = x.shifted(&self.based, self.element.alpha.at_start());
        self.prefactor(x) * self.inner.eval(&moved)
    }
}

/// Paired estimates of `⟨ρF, ρH⟩`, `⟨F, H⟩` and their difference over bridges and the zero mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport<T> {
    pub difference: McEstimate<T>,
    pub acted: McEstimate<T>,
    pub plain: McEstimate<T>,
}

/// The zero mode carries Lebesgue measure; it is sampled from `N(0, x0_scale²)` and reweighted.
#[allow(clippy::too_many_arguments)]
pub fn unitarity_check<T: Real, F: LoopFunctional<T> + Clone, H: LoopFunctional<T> + Clone>(
    element: &LoopElement<T>,
    params: &RepParams<T>,
    grid: Grid,
    f: &F,
    h: &H,
    x0_scale: T,
    n_samples: u64,
    seed: u64,
) -> Result<UnitarityReport<T>> {
    let rho_f = act_rho(element, params, grid, f.clone())?;
    let rho_h = act_rho(element, params, grid, h.clone())?;
    let est = mc::estimate_many(n_samples, seed, 3, |rng, _, out| {
        let p = draw_bridge(params.t, T::zero(), grid, rng).expect("validated");
        let z = T::standard_normal(rng);
        let x0 = z * x0_scale;
        let inv_pdf = T::TAU().sqrt() * x0_scale * (z * z / T::lit(2.0)).exp();
        let x = ShiftedPath::new(&p, x0);
        let acted = rho_f.eval(&x).conj() * rho_h.eval(&x) * inv_pdf;
        let plain = f.eval(&x).conj() * h.eval(&x) * inv_pdf;
        out[0] = acted - plain;
        out[1] = acted;
        out[2] = plain;
    })?;
    Ok(UnitarityReport { difference: est[0], acted: est[1], plain: est[2] })
}

/// Mean of `|ρ(h)F|` over bridges in the semigroup regime.
pub fn semigroup_bound<T: Real, F: LoopFunctional<T>>(acted: &Acted<T, F>, n_samples: u64, seed: u64) -> Result<McEstimate<T>> {
    let grid = acted.grid;
    mc::estimate(n_samples, seed, |rng, _| {
        let p = draw_bridge(acted.params.t, T::zero(), grid, rng).expect("validated");
        let x0 = T::standard_normal(rng);
        Complex::new(acted.eval(&ShiftedPath::new(&p, x0)).norm(), T::zero())
    })
}
