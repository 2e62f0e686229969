use loopax::smooth::{Smooth, TrigPoly};
use loopax::wiener::{cameron_martin_energy, mc_expect, translation_weight, Grid, Path, PathKind};
use num_complex::Complex64;
use serde::Deserialize;

use super::{params, subseed, Plan};
use crate::config::{ensure, ExperimentConfig};
use crate::report::CheckRow;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Girsanov {
    t: f64,
    n_steps: usize,
    n_samples: u64,
    sigmas: f64,
    directions: Vec<TrigPoly<f64>>,
}

pub(super) fn girsanov(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Girsanov = params(config)?;
    ensure(p.t > 0.0, "t must be positive")?;
    ensure(p.n_samples > 0, "n_samples must be positive")?;
    ensure(p.sigmas > 0.0, "sigmas must be positive")?;
    ensure(!p.directions.is_empty(), "at least one direction")?;
    let grid = Grid::new(p.n_steps)?;
    for (k, y) in p.directions.iter().enumerate() {
        let bound = 1e-12 * (1.0 + y.sup_bound());
        ensure(y.value(0.0).abs() <= bound, &format!("direction {k} must vanish at the endpoints of a bridge"))?;
    }
    Ok(Plan::new(Some(p.n_steps), move |ctx| {
        p.directions
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let weight = |x: &Path<f64>| Complex64::new(translation_weight(y, x, p.t).expect("grid is valid"), 0.0);
                let est = mc_expect(weight, p.t, grid, PathKind::Bridge { endpoint: 0.0 }, p.n_samples, subseed(ctx, k))?;
                let energy = cameron_martin_energy(y, grid);
                let parameters = format!("direction={k}; t={}; n_steps={}; n_samples={}; energy={energy:.6}", p.t, p.n_steps, p.n_samples);
                Ok(CheckRow::within_sigmas(format!("unit_mean[{k}]"), parameters, &est, Complex64::new(1.0, 0.0), p.sigmas))
            })
            .collect()
    }))
}
