//! Wiener and conditional Wiener (bridge) measures on `[0, 2π]`.
//!
//! Increments over a step `Δ` have variance `t·Δ`. Stieltjes integrals evaluate the
//! integrand's derivative at the left endpoint of each increment.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mc::{self, McEstimate};
use crate::scalar::Real;
use crate::smooth::{ComplexTrig, Smooth};

/// Uniform grid `u_j = 2πj/n`, `j = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    n_steps: usize,
}

impl Grid {
    pub fn new(n_steps: usize) -> Result<Self> {
        if n_steps < 2 {
            return Err(invalid("n_steps", format!("need at least 2 steps, got {n_steps}")));
        }
        Ok(Self { n_steps })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn step<T: Real>(&self) -> T {
        T::TAU() / T::from_usize_lossy(self.n_steps)
    }

    pub fn node<T: Real>(&self, j: usize) -> T {
        self.step::<T>() * T::from_usize_lossy(j)
    }

    pub fn nodes<T: Real>(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.n_steps).map(|j| self.node(j))
    }

    /// Trapezoid weights for `∫₀^{2π} f(u) du` on the nodes.
    pub fn trapezoid_weights<T: Real>(&self) -> Vec<T> {
        let h = self.step::<T>();
        (0..=self.n_steps).map(|j| if j == 0 || j == self.n_steps { h * T::lit(0.5) } else { h }).collect()
    }

    /// `∫₀^{2π} f(u) du` by the trapezoid rule on the nodes.
    pub fn integrate<T: Real>(&self, f: impl Fn(T) -> T) -> T {
        self.nodes().zip(self.trapezoid_weights::<T>()).map(|(u, w)| w * f(u)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathKind<T> {
    Free,
    Bridge { endpoint: T },
}

/// A sampled path with `values[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path<T> {
    pub grid: Grid,
    pub values: Vec<T>,
    pub variance_t: T,
    pub kind: PathKind<T>,
}

impl<T: Real> Path<T> {
    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// `x + y` sampled on the same grid; the shift must vanish at `u = 0`.
    pub fn translated(&self, y: &dyn Smooth<T>) -> Path<T> {
        let values = self.values.iter().zip(self.grid.nodes::<T>()).map(|(&x, u)| x + y.value(u)).collect();
        let kind = match self.kind {
            PathKind::Free => PathKind::Free,
            PathKind::Bridge { endpoint } => PathKind::Bridge { endpoint: endpoint + y.value(T::TAU()) },
        };
        Path { grid: self.grid, values, variance_t: self.variance_t, kind }
    }

    /// `∫₀^{2π} x(u) f(u) du` by the trapezoid rule.
    pub fn integrate_against(&self, f: impl Fn(T) -> Complex<T>) -> Complex<T> {
        self.values
            .iter()
            .zip(self.grid.nodes::<T>())
            .zip(self.grid.trapezoid_weights::<T>())
            .fold(Complex::new(T::zero(), T::zero()), |acc, ((&x, u), w)| acc + f(u) * (x * w))
    }
}

fn check_variance<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero() && t.is_finite()) {
        return Err(invalid("t", format!("variance must be positive, got {t}")));
    }
    Ok(())
}

/// Free path from exact Gaussian increments.
pub fn draw_free_path<T: Real, R: Rng + ?Sized>(t: T, grid: Grid, rng: &mut R) -> Result<Path<T>> {
    check_variance(t)?;
    let sd = (t * grid.step::<T>()).sqrt();
    let mut values = Vec::with_capacity(grid.n_steps() + 1);
    let mut x = T::zero();
    values.push(x);
    for _ in 0..grid.n_steps() {
        x = x + sd * T::standard_normal(rng);
        values.push(x);
    }
    Ok(Path { grid, values, variance_t: t, kind: PathKind::Free })
}

/// Bridge pinned at `x(2π) = endpoint`, built from a free path by the linear correction.
pub fn draw_bridge<T: Real, R: Rng + ?Sized>(t: T, endpoint: T, grid: Grid, rng: &mut R) -> Result<Path<T>> {
    let mut path = draw_free_path(t, grid, rng)?;
    let n = grid.n_steps();
    let excess = path.values[n] - endpoint;
    let inv_n = T::one() / T::from_usize_lossy(n);
    for (j, v) in path.values.iter_mut().enumerate() {
        *v = *v - T::from_usize_lossy(j) * inv_n * excess;
    }
    path.values[n] = endpoint;
    path.kind = PathKind::Bridge { endpoint };
    Ok(path)
}

pub fn sample_free_path<T: Real>(t: T, grid: Grid, seed: u64) -> Result<Path<T>> {
    draw_free_path(t, grid, &mut mc::sample_rng(seed, 0))
}

pub fn sample_bridge<T: Real>(t: T, endpoint: T, grid: Grid, seed: u64) -> Result<Path<T>> {
    draw_bridge(t, endpoint, grid, &mut mc::sample_rng(seed, 0))
}

/// `Σ_j y′(u_j)(x_{j+1} − x_j)`.
pub fn stieltjes_pair<T: Real>(y: &dyn Smooth<T>, x: &Path<T>) -> T {
    x.grid.nodes::<T>().zip(x.increments()).map(|(u, dx)| y.derivative(u) * dx).sum()
}

/// Stieltjes pairing with the derivative given as left-node samples.
pub fn stieltjes_pair_sampled<T: Real>(dy: &[T], x: &Path<T>) -> Result<T> {
    if dy.len() != x.grid.n_steps() {
        return Err(Error::GridMismatch { expected: x.grid.n_steps(), found: dy.len() });
    }
    Ok(dy.iter().zip(x.increments()).map(|(&d, dx)| d * dx).sum())
}

/// `∫ y′² du`, evaluated with the same left-node rule as [`stieltjes_pair`].
pub fn cameron_martin_energy<T: Real>(y: &dyn Smooth<T>, grid: Grid) -> T {
    let h = grid.step::<T>();
    grid.nodes::<T>().take(grid.n_steps()).map(|u| y.derivative(u).powi(2) * h).sum()
}

/// `exp(−(1/t)∫y′dx − (1/2t)∫y′² du)`.
pub fn translation_weight<T: Real>(y: &dyn Smooth<T>, x: &Path<T>, t: T) -> Result<T> {
    check_variance(t)?;
    let energy = cameron_martin_energy(y, x.grid);
    Ok((-(stieltjes_pair(y, x) / t) - energy / (T::lit(2.0) * t)).exp())
}

/// Cylinder functionals with a known closed form under the Gaussian measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Functional<T> {
    /// `exp(∫ x z du)`.
    Exponential(ComplexTrig<T>),
    /// `x(u_node)^power`.
    NodeMoment { node: usize, power: i32 },
}

impl<T: Real> Functional<T> {
    pub fn eval(&self, x: &Path<T>) -> Complex<T> {
        match self {
            Functional::Exponential(z) => x.integrate_against(|u| z.eval(u)).exp(),
            Functional::NodeMoment { node, power } => Complex::new(x.values[*node].powi(*power), T::zero()),
        }
    }
}

/// Covariance of the path at `(s, s′)` under the given kind.
pub fn covariance<T: Real>(kind: PathKind<T>, t: T, s: T, s2: T) -> T {
    let (lo, hi) = if s <= s2 { (s, s2) } else { (s2, s) };
    match kind {
        PathKind::Free => t * lo,
        PathKind::Bridge { .. } => t * lo * (T::TAU() - hi) / T::TAU(),
    }
}

pub fn mean_value<T: Real>(kind: PathKind<T>, s: T) -> T {
    match kind {
        PathKind::Free => T::zero(),
        PathKind::Bridge { endpoint } => s * endpoint / T::TAU(),
    }
}

/// Discrete quadratic form `Σ w_i w_j z_i z_j C(u_i, u_j)` on the grid.
pub fn covariance_form<T: Real>(z: &ComplexTrig<T>, kind: PathKind<T>, t: T, grid: Grid) -> Complex<T> {
    let nodes: Vec<T> = grid.nodes().collect();
    let w = grid.trapezoid_weights::<T>();
    let zw: Vec<Complex<T>> = nodes.iter().zip(&w).map(|(&u, &wj)| z.eval(u) * wj).collect();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..nodes.len() {
        let mut row = Complex::new(T::zero(), T::zero());
        for j in 0..nodes.len() {
            row = row + zw[j] * covariance(kind, t, nodes[i], nodes[j]);
        }
        acc = acc + zw[i] * row;
    }
    acc
}

/// `E[exp(∫ x z du)]` for the discretized Gaussian path.
pub fn gaussian_moment<T: Real>(z: &ComplexTrig<T>, kind: PathKind<T>, t: T, grid: Grid) -> Complex<T> {
    let mean: Complex<T> = grid
        .nodes::<T>()
        .zip(grid.trapezoid_weights::<T>())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (u, w)| acc + z.eval(u) * (mean_value(kind, u) * w));
    (mean + covariance_form(z, kind, t, grid) * T::lit(0.5)).exp()
}

/// Monte Carlo expectation of a path functional over i.i.d. paths.
pub fn mc_expect<T, F>(functional: F, t: T, grid: Grid, kind: PathKind<T>, n_samples: u64, seed: u64) -> Result<McEstimate<T>>
where
    T: Real,
    F: Fn(&Path<T>) -> Complex<T> + Sync,
{
    check_variance(t)?;
    mc::estimate(n_samples, seed, |rng, _| {
        let path = match kind {
            PathKind::Free => draw_free_path(t, grid, rng),
            PathKind::Bridge { endpoint } => draw_bridge(t, endpoint, grid, rng),
        }
        .expect("variance validated");
        functional(&path)
    })
}

/// Closed form of `∫ f(x + i y) dw₀^{2t}(x)` for `f = exp(∫ x z du)`.
pub fn fourier_wiener_exp<T: Real>(f: &Functional<T>, y: &Path<T>, t: T) -> Result<Complex<T>> {
    check_variance(t)?;
    let Functional::Exponential(z) = f else {
        return Err(Error::NotExponential);
    };
    let i = Complex::new(T::zero(), T::one());
    let shift = y.integrate_against(|u| z.eval(u)) * i;
    let q = covariance_form(z, PathKind::Bridge { endpoint: T::zero() }, T::lit(2.0) * t, y.grid);
    Ok((shift + q * T::lit(0.5)).exp())
}
