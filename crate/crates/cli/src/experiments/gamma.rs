use loopax::gamma_suite::{
    gamma_reg, gamma_reg_functional_residual, gamma_reg_limit_check, loop_gamma_functional_eq_residual, GammaRegParams, LimitVerdict,
    LoopGammaInput,
};
use loopax::smooth::{ComplexTrig, Smooth, TrigPoly};
use loopax::wiener::Grid;
use num_complex::Complex64;
use serde::Deserialize;

use super::{params, subseed, Plan};
use crate::config::{ensure, ExperimentConfig};
use crate::report::CheckRow;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitCase {
    mu: f64,
    z: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Regularized {
    t: f64,
    mu: Vec<f64>,
    /// `[re, im]` pairs.
    z: Vec<[f64; 2]>,
    step: f64,
    tolerance: f64,
    limit_t: Vec<f64>,
    limits: Vec<LimitCase>,
}

pub(super) fn regularized(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Regularized = params(config)?;
    for &mu in &p.mu {
        GammaRegParams::new(mu, p.t)?;
    }
    ensure(p.step > 0.0 && p.tolerance > 0.0, "step and tolerance must be positive")?;
    ensure(p.limit_t.len() > 1 && p.limit_t.windows(2).all(|w| w[0] < w[1]), "limit_t must increase")?;
    for case in &p.limits {
        ensure(case.z > 0.0, "limit cases need Re z > 0")?;
        GammaRegParams::new(case.mu, p.t)?;
    }
    Ok(Plan::new(None, move |_| {
        let mut rows = Vec::new();
        for &mu in &p.mu {
            let reg = GammaRegParams::new(mu, p.t)?;
            for &[re, im] in &p.z {
                let z = Complex64::new(re, im);
                let residual = gamma_reg_functional_residual(reg, z, p.step)?.norm();
                let value = gamma_reg(reg, z)?;
                let parameters = format!("mu={mu}; z={re}{im:+}i; t={}; gamma={:.10}{:+.10}i", p.t, value.re, value.im);
                rows.push(CheckRow::absolute(format!("functional_eq[mu={mu},z={re}{im:+}i]"), parameters, residual, 0.0, p.tolerance));
            }
        }
        for case in &p.limits {
            let report = gamma_reg_limit_check(case.mu, Complex64::new(case.z, 0.0), &p.limit_t)?;
            let errors: Vec<String> = report.rows.iter().map(|r| format!("t={}:{:.3e}", r.t, r.error_vs_oracle)).collect();
            let parameters = format!(
                "mu={}; z={}; oracle={:.10}; errors=[{}]; verdict={:?}",
                case.mu,
                case.z,
                report.oracle.re,
                errors.join(" "),
                report.verdict
            );
            rows.push(CheckRow::holds(
                format!("limit_error_decreases[mu={},z={}]", case.mu, case.z),
                parameters.clone(),
                report.oracle_error_monotone,
            ));
            rows.push(CheckRow::holds(
                format!("limit_is_oracle[mu={},z={}]", case.mu, case.z),
                parameters,
                report.verdict == LimitVerdict::Oracle,
            ));
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Profile {
    z: ComplexTrig<f64>,
    mu: TrigPoly<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalEq {
    t: f64,
    n_steps: usize,
    n_samples: u64,
    sigmas: f64,
    control_scale: f64,
    control_sigmas: f64,
    profiles: Vec<Profile>,
    test_functions: Vec<TrigPoly<f64>>,
}

pub(super) fn functional_eq(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: FunctionalEq = params(config)?;
    let grid = Grid::new(p.n_steps)?;
    ensure(p.t > 0.0 && p.n_samples > 0, "t and n_samples must be positive")?;
    ensure(p.sigmas > 0.0 && p.control_sigmas > 0.0, "sigma thresholds must be positive")?;
    ensure(p.control_scale != 1.0, "the control must perturb the 1/t coefficient")?;
    for (k, g) in p.test_functions.iter().enumerate() {
        let bound = 1e-10 * (1.0 + g.sup_bound());
        ensure(g.value(0.0).abs() <= bound, &format!("test function {k} must vanish at the endpoints"))?;
    }
    for (k, profile) in p.profiles.iter().enumerate() {
        let negative = grid.nodes::<f64>().any(|u| profile.mu.value(u) < 0.0);
        ensure(!negative, &format!("profile {k} needs mu >= 0"))?;
    }
    Ok(Plan::new(Some(p.n_steps), move |ctx| {
        let main_scale = if ctx.sensitivity { p.control_scale } else { 1.0 };
        let mut rows = Vec::new();
        for (pi, profile) in p.profiles.iter().enumerate() {
            for (gi, g) in p.test_functions.iter().enumerate() {
                let input = LoopGammaInput {
                    z: profile.z.clone(),
                    mu: profile.mu.clone(),
                    t: p.t,
                    grid,
                    n_samples: p.n_samples,
                    seed: subseed(ctx, pi * p.test_functions.len() + gi),
                };
                let zero = Complex64::new(0.0, 0.0);
                let main = loop_gamma_functional_eq_residual(g, &input, main_scale)?;
                let parameters = format!("profile={pi}; g={gi}; t={}; n_samples={}; t_coefficient_scale={main_scale}", p.t, p.n_samples);
                rows.push(CheckRow::within_sigmas(format!("residual[profile={pi},g={gi}]"), parameters, &main.residual, zero, p.sigmas));
                let control = loop_gamma_functional_eq_residual(g, &input, p.control_scale)?;
                let z = control.residual.z_score(zero);
                rows.push(CheckRow {
                    rule: format!("perturbed residual z-score > {}", p.control_sigmas),
                    stderr: Some(control.residual.stderr),
                    passed: z > p.control_sigmas,
                    ..CheckRow::absolute(
                        format!("control_detected[profile={pi},g={gi}]"),
                        format!("t_coefficient_scale={}; residual={:.3e}", p.control_scale, control.residual.mean.norm()),
                        z,
                        p.control_sigmas,
                        0.0,
                    )
                });
            }
        }
        Ok(rows)
    }))
}
