use loopax::gauss_field::{correlator_exp_closed, correlator_exp_mc, Algebra, WeightSequence};
use num_complex::Complex64;
use serde::Deserialize;

use super::{params, subseed, Plan};
use crate::config::{ensure, ExperimentConfig};
use crate::report::CheckRow;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Profile {
    xi0: Option<f64>,
    ratio: f64,
    cutoff: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Correlators {
    k: Profile,
    a: Profile,
    angles: Vec<f64>,
    max_insertions: usize,
    n_samples: u64,
    sigmas: f64,
}

pub(super) fn correlators(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Correlators = params(config)?;
    ensure(p.k.xi0.is_none(), "the K profile has no zero-mode weight")?;
    let k = WeightSequence::geometric(Algebra::K, None, p.k.ratio, p.k.cutoff)?;
    let a = WeightSequence::geometric(Algebra::A, p.a.xi0, p.a.ratio, p.a.cutoff)?;
    ensure(p.angles.len() >= p.max_insertions, "need one angle per insertion")?;
    ensure(p.n_samples > 0 && p.sigmas > 0.0, "n_samples and sigmas must be positive")?;
    let cutoff = p.k.cutoff.max(p.a.cutoff);
    Ok(Plan::new(Some(cutoff), move |ctx| {
        let mut rows = Vec::new();
        let mut index = 0;
        for w in [&k, &a] {
            for total in 1..=p.max_insertions {
                for n in 0..=total {
                    let m = total - n;
                    let (plus, minus) = (&p.angles[..n], &p.angles[n..total]);
                    let closed = correlator_exp_closed(plus, minus, w);
                    let parameters = format!("algebra={:?}; plus={plus:?}; minus={minus:?}", w.algebra);
                    let label = format!("{:?}[n={n},m={m}]", w.algebra);
                    if w.algebra == Algebra::K && n != m {
                        rows.push(CheckRow::absolute(format!("unbalanced_zero_{label}"), parameters, closed, 0.0, 0.0));
                        continue;
                    }
                    let est = correlator_exp_mc(plus, minus, w, p.n_samples, subseed(ctx, index))?;
                    index += 1;
                    rows.push(CheckRow::within_sigmas(
                        format!("closed_vs_sampled_{label}"),
                        parameters,
                        &est,
                        Complex64::new(closed, 0.0),
                        p.sigmas,
                    ));
                }
            }
        }
        Ok(rows)
    }))
}
