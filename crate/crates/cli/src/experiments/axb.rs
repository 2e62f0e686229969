use std::f64::consts::TAU;

use loopax::axb_group::finite::bump;
use loopax::axb_group::{
    gamma_kernel_extrapolated, lie_generator_d, unitarity_check, ExpFunctional, GroupElementG, LaplaceImage, LoopElement, LoopGroup,
    Regime, RepParams, SampledFn, Subgroup,
};
use loopax::mc::sample_rng;
use loopax::quad;
use loopax::smooth::{ComplexTrig, Smooth, TrigPoly};
use loopax::wiener::Grid;
use num_complex::Complex64;
use rand::Rng;
use serde::Deserialize;

use super::{params, subseed, Plan};
use crate::config::{ensure, ExperimentConfig};
use crate::report::CheckRow;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Element {
    alpha: TrigPoly<f64>,
    b: TrigPoly<f64>,
    s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Exponential {
    z: ComplexTrig<f64>,
    x0_linear: [f64; 2],
    x0_quadratic: f64,
}

impl Exponential {
    fn build(&self, grid: Grid) -> ExpFunctional<f64> {
        ExpFunctional::new(&self.z, grid, Complex64::new(self.x0_linear[0], self.x0_linear[1]), self.x0_quadratic)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Unitarity {
    t: f64,
    lambda: ComplexTrig<f64>,
    k: Vec<f64>,
    n_steps: usize,
    n_samples: u64,
    x0_scale: f64,
    sigmas: f64,
    f: Exponential,
    h: Exponential,
    elements: Vec<Element>,
}

pub(super) fn unitarity(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Unitarity = params(config)?;
    let grid = Grid::new(p.n_steps)?;
    ensure(p.n_samples > 0, "n_samples must be positive")?;
    ensure(p.x0_scale > 0.0, "x0_scale must be positive")?;
    ensure(p.sigmas > 0.0, "sigmas must be positive")?;
    ensure(!p.elements.is_empty() && !p.k.is_empty(), "at least one element and one k")?;
    ensure(p.f.x0_quadratic > 0.0 && p.h.x0_quadratic > 0.0, "functionals must decay in the zero mode")?;
    let reps = p.k.iter().map(|&k| RepParams::new(p.lambda.clone(), k, p.t, Regime::Unitary)).collect::<Result<Vec<_>, _>>()?;
    let group = LoopGroup::new(Subgroup::Extended, 0.0);
    let elements: Vec<LoopElement<f64>> = p.elements.iter().map(|e| LoopElement::from_trig(e.alpha.clone(), e.b.clone(), e.s)).collect();
    for el in &elements {
        group.check(el)?;
    }
    Ok(Plan::new(Some(p.n_steps), move |ctx| {
        let (f, h) = (p.f.build(grid), p.h.build(grid));
        let mut rows = Vec::new();
        for (ki, rep) in reps.iter().enumerate() {
            for (e, el) in elements.iter().enumerate() {
                let seed = subseed(ctx, ki * elements.len() + e);
                let r = unitarity_check(el, rep, grid, &f, &h, p.x0_scale, p.n_samples, seed)?;
                let parameters = format!(
                    "k={}; element={e}; t={}; n_samples={}; <F,H>={:.6}{:+.6}i",
                    rep.k, p.t, p.n_samples, r.plain.mean.re, r.plain.mean.im
                );
                rows.push(CheckRow::within_sigmas(
                    format!("inner_product[k={},element={e}]", rep.k),
                    parameters,
                    &r.difference,
                    Complex64::new(0.0, 0.0),
                    p.sigmas,
                ));
            }
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cocycle {
    k: f64,
    n_triples: usize,
    triple_degree: usize,
    cocycle_tolerance: f64,
    n_pairs: usize,
    pair_degree: usize,
    bracket_tolerance: f64,
}

fn random_trig(rng: &mut impl Rng, degree: usize) -> TrigPoly<f64> {
    let constant = rng.random_range(-1.0..1.0);
    let cos = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sin = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    TrigPoly::new(constant, cos, sin)
}

pub(super) fn cocycle(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Cocycle = params(config)?;
    ensure(p.k.is_finite(), "k must be finite")?;
    ensure(p.n_triples > 0 && p.n_pairs > 0, "counts must be positive")?;
    ensure(p.triple_degree > 0 && p.pair_degree > 0, "degrees must be positive")?;
    ensure(p.cocycle_tolerance > 0.0 && p.bracket_tolerance > 0.0, "tolerances must be positive")?;
    Ok(Plan::new(None, move |ctx| {
        let group = LoopGroup::new(Subgroup::Extended, p.k);
        let mut rows = Vec::new();
        for j in 0..p.n_triples {
            let mut rng = sample_rng(ctx.seed, j as u64);
            let h: Vec<LoopElement<f64>> = (0..3)
                .map(|_| {
                    let s = rng.random_range(-1.0..1.0);
                    LoopElement::from_trig(random_trig(&mut rng, p.triple_degree), random_trig(&mut rng, p.triple_degree), s)
                })
                .collect();
            let (a1, a2, a3) = (&h[0].alpha, &h[1].alpha, &h[2].alpha);
            let lhs = group.cocycle(a1, a2) + group.cocycle(&a1.add(a2), a3);
            let rhs = group.cocycle(a2, a3) + group.cocycle(a1, &a2.add(a3));
            rows.push(CheckRow::absolute(
                format!("cocycle[{j}]"),
                format!("k={}; degree={}", p.k, p.triple_degree),
                lhs - rhs,
                0.0,
                p.cocycle_tolerance,
            ));
            let left = group.mul(&group.mul(&h[0], &h[1])?, &h[2])?;
            let right = group.mul(&h[0], &group.mul(&h[1], &h[2])?)?;
            rows.push(CheckRow::absolute(
                format!("central_associativity[{j}]"),
                format!("k={}", p.k),
                left.s - right.s,
                0.0,
                p.cocycle_tolerance,
            ));
        }
        for j in 0..p.n_pairs {
            let mut rng = sample_rng(ctx.seed, (p.n_triples + j) as u64);
            let (a1, a2) = (random_trig(&mut rng, p.pair_degree), random_trig(&mut rng, p.pair_degree));
            let t = rng.random_range(0.5..2.0);
            let d1 = lie_generator_d(&a1, p.k, t, p.pair_degree)?;
            let d2 = lie_generator_d(&a2, p.k, t, p.pair_degree)?;
            let bracket = d1.commutator(&d2);
            let parameters = format!("k={}; t={t:.6}; degree={}", p.k, p.pair_degree);
            let Some(value) = bracket.as_scalar(p.bracket_tolerance) else {
                rows.push(CheckRow::holds(format!("bracket_is_central[{j}]"), parameters, false));
                continue;
            };
            let integral = quad::adaptive(|u: f64| a1.derivative(u) * a2.value(u), 0.0, TAU, 1e-14)?;
            let oracle = Complex64::new(0.0, -2.0 * p.k * integral);
            let distance = (value - oracle).norm();
            rows.push(CheckRow::absolute(
                format!("bracket[{j}]"),
                format!("{parameters}; value={:.12}i; oracle={:.12}i", value.im, oracle.im),
                distance,
                0.0,
                p.bracket_tolerance,
            ));
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaKernel {
    a: f64,
    b: f64,
    lambda: f64,
    bump_center: f64,
    bump_width: f64,
    sample_start: f64,
    sample_step: f64,
    n_samples: usize,
    t1: Vec<f64>,
    relative_tolerance: f64,
}

pub(super) fn gamma_kernel(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: GammaKernel = params(config)?;
    let g = GroupElementG::new(p.a, p.b)?;
    ensure(p.lambda < 0.0 && p.b >= 0.0, "lambda < 0 and b >= 0 keep the multiplier bounded")?;
    ensure(p.bump_width > 0.0 && p.sample_step > 0.0 && p.n_samples > 1, "sampling must be nondegenerate")?;
    let end = p.sample_start + p.sample_step * (p.n_samples - 1) as f64;
    ensure(p.sample_start <= p.bump_center - p.bump_width && end >= p.bump_center + p.bump_width, "samples must cover the bump support")?;
    ensure(!p.t1.is_empty() && p.relative_tolerance > 0.0, "at least one t1 and a positive tolerance")?;
    Ok(Plan::new(None, move |_| {
        let phi = bump(p.bump_center, p.bump_width);
        let image = LaplaceImage::new(SampledFn::from_fn(p.sample_start, p.sample_step, p.n_samples, |t| Complex64::new(phi(t), 0.0)));
        let f = |s| image.eval(s);
        let shift = g.log_a();
        let i = Complex64::new(0.0, 1.0);
        p.t1.iter()
            .map(|&t1| {
                let kernel = gamma_kernel_extrapolated(g, p.lambda, &f, t1)?.value;
                let integrand = |t: f64| (i * t1 * t).exp() * ((p.lambda * p.b * t.exp()).exp() * phi(t + shift));
                let (lo, hi) = (p.bump_center - p.bump_width - shift, p.bump_center + p.bump_width - shift);
                let oracle = quad::adaptive(integrand, lo, hi, 1e-13)? / TAU.sqrt();
                let parameters = format!(
                    "a={}; b={}; lambda={}; t1={t1}; kernel={:.10}{:+.10}i; conjugated={:.10}{:+.10}i",
                    p.a, p.b, p.lambda, kernel.re, kernel.im, oracle.re, oracle.im
                );
                let relative = (kernel - oracle).norm() / oracle.norm();
                Ok(CheckRow {
                    rule: format!("|kernel - conjugated| / |conjugated| <= {:e}", p.relative_tolerance),
                    ..CheckRow::absolute(format!("kernel[t1={t1}]"), parameters, relative, 0.0, p.relative_tolerance)
                })
            })
            .collect()
    }))
}
