//! The classical Γ-function, the regularized `Γ_{μ,t}` and the loop Γ-functional.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::{self, McEstimate};
use crate::quad;
use crate::scalar::Real;
use crate::smooth::{ComplexTrig, Smooth, TrigPoly};
use crate::wiener::{draw_bridge, Grid, Path};

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `Γ(z) = ∫₀^∞ e^{−x} x^{z−1} dx` by exp-sinh quadrature, `Re z > 0`.
///
/// With `x = exp((π/2) sinh s)` the integrand becomes `exp(−x + z ln x)(π/2) cosh s`, which decays
/// double-exponentially at both ends; the step is halved until the relative change drops below 1e-13.
pub fn gamma_classical<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !(z.re > T::zero()) {
        return Err(invalid("z", format!("Re z must be positive, got {}", z.re)));
    }
    let half_pi = T::FRAC_PI_2();
    let term = |s: T| {
        let ln_x = half_pi * s.sinh();
        (c(-ln_x.exp()) + z * ln_x).exp() * (half_pi * s.cosh())
    };
    let tiny = T::lit(1e-18);
    let sweep = |h: T| -> Complex<T> {
        let mut acc = term(T::zero());
        for dir in [T::one(), -T::one()] {
            let mut k = 1usize;
            loop {
                let v = term(dir * h * T::from_usize_lossy(k));
                acc = acc + v;
                if v.norm() <= tiny * acc.norm() || k > 1_000_000 {
                    break;
                }
                k += 1;
            }
        }
        acc * h
    };
    let mut h = T::lit(0.5);
    let mut prev = sweep(h);
    for _ in 0..12 {
        h = h * T::lit(0.5);
        let next = sweep(h);
        if (next - prev).norm() <= T::lit(1e-13) * next.norm() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("exp-sinh did not settle for z = {z}")))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ on the whole complex plane (Lanczos, reflection for `Re z < ½`).
pub fn gamma_lanczos<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        let pi = T::PI();
        return c(pi) / ((z * pi).sin() * gamma_lanczos(c(T::one()) - z));
    }
    let z = z - c(T::one());
    let mut x = c(T::lit(LANCZOS[0]));
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        x = x + c(T::lit(coef)) / (z + c(T::from_usize_lossy(i)));
    }
    let t = z + c(T::lit(LANCZOS_G) + half);
    let sqrt_two_pi = (T::TAU()).sqrt();
    // t^{z+½} e^{−t} computed through the logarithm to stay finite for large |Im z|.
    ((z + c(half)) * t.ln() - t).exp() * x * sqrt_two_pi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRegParams<T> {
    pub mu: T,
    pub t: T,
}

impl<T: Real> GammaRegParams<T> {
    pub fn new(mu: T, t: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(invalid("mu", format!("must be positive, got {mu}")));
        }
        if !(t > T::zero()) {
            return Err(invalid("t", format!("must be positive, got {t}")));
        }
        Ok(Self { mu, t })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegScheme {
    /// Adaptive Gauss–Kronrod on the truncated line.
    Adaptive,
    /// Composite Simpson rule with the given panel count.
    Simpson(usize),
}

const REG_TOL: f64 = 1e-12;

/// `Γ_{μ,t}(z) = ∫ e^{−μeˣ} e^{zx} e^{−x²/2t} dx`.
pub fn gamma_reg<T: Real>(params: GammaRegParams<T>, z: Complex<T>) -> Result<Complex<T>> {
    gamma_reg_with(params, z, RegScheme::Adaptive)
}

pub fn gamma_reg_with<T: Real>(params: GammaRegParams<T>, z: Complex<T>, scheme: RegScheme) -> Result<Complex<T>> {
    let GammaRegParams { mu, t } = GammaRegParams::new(params.mu, params.t)?;
    let integrand = move |x: T| (c(-mu * x.exp() - x * x / (T::lit(2.0) * t)) + z * x).exp();
    let tol = T::lit(REG_TOL);
    // The Gaussian factor centred at Re z · t dominates the left tail.
    let mut half_width = (T::lit(2.0) * t * (T::one() / tol).ln()).sqrt() + z.re.abs() * t;
    for _ in 0..8 {
        let (lo, hi) = (-half_width, half_width);
        let value = match scheme {
            RegScheme::Adaptive => quad::adaptive(integrand, lo, hi, tol * T::lit(1e-2))?,
            RegScheme::Simpson(n) => quad::simpson(integrand, lo, hi, n),
        };
        // Tail bound: the endpoint magnitude times the Gaussian scale √t bounds the neglected mass.
        let tail = (integrand(lo).norm() + integrand(hi).norm()) * t.sqrt();
        if tail <= tol * value.norm().max(T::lit(1e-300)) {
            return Ok(value);
        }
        half_width = half_width * T::lit(2.0);
    }
    Err(Error::Quadrature(format!("truncation bound for Γ_(μ,t) not reached at z = {z}")))
}

/// `Γ′_{μ,t}(z)` by central difference with step `h`.
pub fn gamma_reg_derivative<T: Real>(params: GammaRegParams<T>, z: Complex<T>, h: T) -> Result<Complex<T>> {
    let plus = gamma_reg(params, z + c(h))?;
    let minus = gamma_reg(params, z - c(h))?;
    Ok((plus - minus) / (T::lit(2.0) * h))
}

/// `μΓ(z+1) − zΓ(z) + (1/t)Γ′(z)`.
pub fn gamma_reg_functional_residual<T: Real>(params: GammaRegParams<T>, z: Complex<T>, h: T) -> Result<Complex<T>> {
    let shifted = gamma_reg(params, z + c(T::one()))?;
    let value = gamma_reg(params, z)?;
    let derivative = gamma_reg_derivative(params, z, h)?;
    Ok(shifted * params.mu - z * value + derivative / params.t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow<T> {
    pub t: T,
    pub value: Complex<T>,
    pub error_vs_oracle: T,
    pub error_vs_claim: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitVerdict {
    Oracle,
    Claim,
    Both,
    Neither,
}

/// Tabulation of `Γ_{μ,t}(z+1)` as `t` grows against the two candidate limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport<T> {
    pub mu: T,
    pub z: Complex<T>,
    /// `∫ e^{−μeˣ} e^{(z+1)x} dx` by direct quadrature.
    pub oracle: Complex<T>,
    /// `μ^{−(z+1)} Γ(z+1)`.
    pub oracle_closed_form: Complex<T>,
    /// `μ^{−z} Γ(z)`.
    pub claim: Complex<T>,
    pub rows: Vec<LimitRow<T>>,
    pub oracle_error_monotone: bool,
    pub verdict: LimitVerdict,
}

pub fn gamma_reg_limit_check<T: Real>(mu: T, z: Complex<T>, t_sequence: &[T]) -> Result<LimitReport<T>> {
    if !(z.re > T::zero()) {
        return Err(invalid("z", "Re z must be positive"));
    }
    let zp1 = z + c(T::one());
    let integrand = move |x: T| (c(-mu * x.exp()) + zp1 * x).exp();
    // Left tail decays like e^{(Re z + 1)x}; the right tail double-exponentially.
    let left = -(T::lit(40.0) / zp1.re) - mu.ln().abs();
    let right = T::lit(6.0) - mu.ln();
    let oracle = quad::adaptive(integrand, left, right, T::lit(1e-14))?;
    let mu_c = c(mu);
    let oracle_closed_form = gamma_classical(zp1)? * (-(zp1) * mu_c.ln()).exp();
    let claim = gamma_classical(z)? * (-z * mu_c.ln()).exp();
    let rows = t_sequence
        .iter()
        .map(|&t| {
            let value = gamma_reg(GammaRegParams::new(mu, t)?, zp1)?;
            Ok(LimitRow { t, value, error_vs_oracle: (value - oracle).norm(), error_vs_claim: (value - claim).norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    let oracle_error_monotone = rows.windows(2).all(|w| w[1].error_vs_oracle < w[0].error_vs_oracle);
    // A candidate is the limit when its error decreases along the sequence and at least halves.
    let converges = |f: fn(&LimitRow<T>) -> T| match (rows.first(), rows.last()) {
        (Some(first), Some(last)) if rows.len() > 1 => rows.windows(2).all(|w| f(&w[1]) < f(&w[0])) && f(last) <= T::lit(0.5) * f(first),
        _ => false,
    };
    let to_oracle = converges(|r| r.error_vs_oracle);
    let to_claim = converges(|r| r.error_vs_claim);
    let verdict = match (to_oracle, to_claim) {
        (true, true) => LimitVerdict::Both,
        (true, false) => LimitVerdict::Oracle,
        (false, true) => LimitVerdict::Claim,
        (false, false) => LimitVerdict::Neither,
    };
    Ok(LimitReport { mu, z, oracle, oracle_closed_form, claim, rows, oracle_error_monotone, verdict })
}

/// Inputs of the loop Γ-functional `∫ e^{∫pz} e^{−∫μe^p} dw₀ᵗ(p)` over bridges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopGammaInput<T> {
    pub z: ComplexTrig<T>,
    pub mu: TrigPoly<T>,
    pub t: T,
    pub grid: Grid,
    pub n_samples: u64,
    pub seed: u64,
}

/// Grid samples of the loop Γ inputs with the trapezoid weights.
struct Sampled<T> {
    weights: Vec<T>,
    z: Vec<Complex<T>>,
    mu: Vec<T>,
}

impl<T: Real> LoopGammaInput<T> {
    fn validate(&self) -> Result<Sampled<T>> {
        if !(self.t > T::zero()) {
            return Err(invalid("t", "must be positive"));
        }
        let nodes: Vec<T> = self.grid.nodes().collect();
        let mu: Vec<T> = nodes.iter().map(|&u| self.mu.value(u)).collect();
        if let Some(u) = nodes.iter().zip(&mu).find(|(_, m)| **m < T::zero()).map(|(u, _)| *u) {
            return Err(invalid("mu", format!("must be nonnegative, negative at u = {u}")));
        }
        Ok(Sampled { weights: self.grid.trapezoid_weights(), z: nodes.iter().map(|&u| self.z.eval(u)).collect(), mu })
    }
}

impl<T: Real> Sampled<T> {
    /// `exp(∫ p z − ∫ μ e^p)` on the grid.
    fn integrand(&self, p: &Path<T>) -> Complex<T> {
        let mut exponent = Complex::new(T::zero(), T::zero());
        for (((&x, &w), &z), &m) in p.values.iter().zip(&self.weights).zip(&self.z).zip(&self.mu) {
            exponent = exponent + z * (x * w) - c(m * x.exp() * w);
        }
        exponent.exp()
    }
}

pub fn loop_gamma_estimate<T: Real>(input: &LoopGammaInput<T>) -> Result<McEstimate<T>> {
    let sampled = input.validate()?;
    mc::estimate(input.n_samples, input.seed, |rng, _| {
        let p = draw_bridge(input.t, T::zero(), input.grid, rng).expect("validated");
        sampled.integrand(&p)
    })
}

/// Paired estimates of the two sides of the loop Γ functional equation and their difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEqResidual<T> {
    pub residual: McEstimate<T>,
    pub lhs: McEstimate<T>,
    pub rhs: McEstimate<T>,
}

/// Residual of `∫gμE[e^{p(v)}F] = (∫gz)E[F] + (c/t)∫g″E[p(v)F]` on shared bridge samples.
///
/// `g″` is the centred second difference on the grid, the operator for which the discrete bridge
/// satisfies Gaussian integration by parts exactly. `t_coefficient_scale` multiplies the `1/t`
/// term (1 for the identity, 1.1 for the sensitivity control).
pub fn loop_gamma_functional_eq_residual<T: Real>(
    g: &TrigPoly<T>,
    input: &LoopGammaInput<T>,
    t_coefficient_scale: T,
) -> Result<FunctionalEqResidual<T>> {
    let n = input.grid.n_steps();
    let h = input.grid.step::<T>();
    let g_nodes: Vec<T> = input.grid.nodes().map(|u| g.value(u)).collect();
    let scale = T::lit(1e-10) * (T::one() + g.sup_bound());
    if g_nodes[0].abs() > scale || g_nodes[n].abs() > scale {
        return Err(invalid("g", "must vanish at both endpoints"));
    }
    let sampled = input.validate()?;
    let second_difference: Vec<T> = (0..=n)
        .map(|j| if j == 0 || j == n { T::zero() } else { (g_nodes[j + 1] - T::lit(2.0) * g_nodes[j] + g_nodes[j - 1]) / (h * h) })
        .collect();
    let gz: Complex<T> = (1..n).fold(c(T::zero()), |acc, j| acc + sampled.z[j] * (g_nodes[j] * h));
    let coef = t_coefficient_scale / input.t;
    let est = mc::estimate_many(input.n_samples, input.seed, 3, |rng, _, out| {
        let p = draw_bridge(input.t, T::zero(), input.grid, rng).expect("validated");
        let f = sampled.integrand(&p);
        let mut insertion = T::zero();
        let mut moment = T::zero();
        for j in 1..n {
            insertion = insertion + g_nodes[j] * sampled.mu[j] * p.values[j].exp() * h;
            moment = moment + second_difference[j] * p.values[j] * h;
        }
        let lhs = f * insertion;
        let rhs = f * gz + f * (moment * coef);
        out[0] = lhs - rhs;
        out[1] = lhs;
        out[2] = rhs;
    })?;
    Ok(FunctionalEqResidual { residual: est[0], lhs: est[1], rhs: est[2] })
}
