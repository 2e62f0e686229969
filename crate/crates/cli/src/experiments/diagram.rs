use std::collections::BTreeMap;

use anyhow::Context;
use loopax::diagram_engine::{
    check_relation, classify, correlator_direct, correlator_exact, enumerate_diagrams, flipped_relation, hermiticity_check, relation,
    CurrentKind, CutoffParams, Diagram, FieldParams, FourierCheck, LoopScheme, Topology,
};
use loopax::exact::{rational_point, QI};
use loopax::gauss_field::{Algebra, ExactFock, ModeSpace};
use num_rational::BigRational;
use serde::Deserialize;

use super::{params, Plan};
use crate::config::{ensure, ExperimentConfig};
use crate::report::CheckRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum Family {
    J,
    #[serde(rename = "EFH")]
    Efh,
}

impl Family {
    fn kinds(self) -> [CurrentKind; 3] {
        match self {
            Family::J => CurrentKind::J_FAMILY,
            Family::Efh => CurrentKind::EFH_FAMILY,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Family::J => "J",
            Family::Efh => "EFH",
        }
    }
}

/// Every word of length `n` over the family.
fn contexts(family: Family, n: usize) -> Vec<Vec<CurrentKind>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter().flat_map(|w| family.kinds().into_iter().map(move |k| [w.clone(), vec![k]].concat())).collect()
    })
}

fn word(ctx: &[CurrentKind]) -> String {
    ctx.iter().map(|k| k.name()).collect::<Vec<_>>().join(" ")
}

fn rational(text: &str) -> anyhow::Result<BigRational> {
    text.parse().with_context(|| format!("`{text}` is not a rational number"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
enum SchemeConfig {
    DropLoops,
    LoopWeights { weights: BTreeMap<String, String> },
}

impl SchemeConfig {
    fn build(&self) -> anyhow::Result<(String, LoopScheme)> {
        Ok(match self {
            SchemeConfig::DropLoops => ("drop_loops".into(), LoopScheme::DropLoops),
            SchemeConfig::LoopWeights { weights } => {
                let parsed = weights
                    .iter()
                    .map(|(k, v)| {
                        let len: usize = k.parse().with_context(|| format!("loop length `{k}`"))?;
                        ensure(len >= 2, "loops have at least two vertices")?;
                        Ok((len, rational(v)?))
                    })
                    .collect::<anyhow::Result<BTreeMap<_, _>>>()?;
                let label = parsed.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",");
                (format!("loop_weights{{{label}}}"), LoopScheme::LoopWeights(parsed))
            }
        })
    }
}

/// Cyclomatic number `E − V + 1` of each weakly connected component, by union-find.
fn cyclomatic_numbers(d: &Diagram) -> Vec<usize> {
    let n = d.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while parent[r] != r {
            r = parent[r];
        }
        parent[v] = r;
        r
    }
    for e in &d.edges {
        let (a, b) = (root(&mut parent, e.source), root(&mut parent, e.target));
        parent[a] = b;
    }
    let mut stats: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for v in 0..n {
        stats.entry(root(&mut parent, v)).or_default().0 += 1;
    }
    for e in &d.edges {
        stats.get_mut(&root(&mut parent, e.source)).expect("every vertex has a root").1 += 1;
    }
    stats.values().map(|&(v, e)| e + 1 - v).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Structure {
    families: Vec<Family>,
    max_insertions: usize,
}

pub(super) fn structure(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Structure = params(config)?;
    ensure((1..=4).contains(&p.max_insertions), "max_insertions must lie in 1..=4")?;
    Ok(Plan::new(None, move |_| {
        let mut rows = Vec::new();
        for &family in &p.families {
            for n in 1..=p.max_insertions {
                let (mut diagrams, mut multi, mut disagree, mut loops) = (0usize, 0usize, 0usize, 0usize);
                for ctx in contexts(family, n) {
                    for d in enumerate_diagrams(&ctx)? {
                        diagrams += 1;
                        let cyc = cyclomatic_numbers(&d);
                        multi += cyc.iter().any(|&c| c > 1) as usize;
                        let counted = match classify(&d)? {
                            Topology::Tree => 0,
                            Topology::OneLoop(_) => 1,
                            Topology::Loops(ks) => ks.len(),
                        };
                        disagree += (counted != cyc.iter().sum::<usize>()) as usize;
                        loops += (counted > 0) as usize;
                    }
                }
                let f = family.label();
                let parameters = format!("family={f}; n={n}; diagrams={diagrams}; with_loops={loops}");
                rows.push(CheckRow::absolute(format!("multi_loop_components[{f},n={n}]"), parameters.clone(), multi as f64, 0.0, 0.0));
                rows.push(CheckRow::absolute(format!("loop_count_mismatches[{f},n={n}]"), parameters, disagree as f64, 0.0, 0.0));
            }
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Point {
    radius: String,
    triple: [i64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Equivalence {
    families: Vec<Family>,
    max_insertions: usize,
    xi0: String,
    xi: Vec<String>,
    kappa: String,
    p: String,
    points: Vec<Point>,
}

pub(super) fn equivalence(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Equivalence = params(config)?;
    ensure(p.points.len() >= p.max_insertions, "need one point per insertion")?;
    let points = p
        .points
        .iter()
        .map(|pt| {
            let r = rational(&pt.radius)?;
            ensure(r > BigRational::from_integer(0.into()) && r < BigRational::from_integer(1.into()), "radii must lie in (0, 1)")?;
            Ok(rational_point(r, pt.triple[0], pt.triple[1], pt.triple[2])?)
        })
        .collect::<anyhow::Result<Vec<QI>>>()?;
    let xi: Vec<BigRational> = p.xi.iter().map(|x| rational(x)).collect::<anyhow::Result<_>>()?;
    let xi0 = rational(&p.xi0)?;
    let zero = BigRational::from_integer(0.into());
    let kappa = QI::new(rational(&p.kappa)?, zero.clone());
    let pp = QI::new(rational(&p.p)?, zero);
    let setups = p
        .families
        .iter()
        .map(|&family| {
            let algebra = family.kinds()[0].algebra();
            let space = ModeSpace::new(algebra, (algebra == Algebra::A).then(|| xi0.clone()), xi.clone())?;
            let fock = ExactFock { kappa: kappa.clone(), p: pp.clone(), orientation: family.kinds()[0].fock_orientation() };
            Ok((family, space, fock))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Plan::new(Some(xi.len()), move |_| {
        let mut rows = Vec::new();
        for (family, space, fock) in &setups {
            for n in 1..=p.max_insertions {
                for ctx in contexts(*family, n) {
                    let pts = &points[..n];
                    let engine = correlator_exact(&ctx, pts, &FieldParams::exact(space, fock))?;
                    let direct = correlator_direct(space, fock, &ctx, pts)?;
                    let parameters = format!("family={}; exponential_terms={}", family.label(), direct.len());
                    rows.push(CheckRow::holds(format!("engine_equals_direct[{}]", word(&ctx)), parameters, engine == direct));
                }
            }
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Commutators {
    families: Vec<Family>,
    sizes: Vec<usize>,
    schemes: Vec<SchemeConfig>,
    xi0: f64,
    xi: Vec<f64>,
    kappa: f64,
    p: f64,
    cutoff: usize,
    grid: usize,
    max_mode: i32,
    tolerance: f64,
}

pub(super) fn commutators(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Commutators = params(config)?;
    ensure(p.sizes.iter().all(|&n| (2..=3).contains(&n)), "contexts have 2 or 3 insertions")?;
    ensure(p.xi0 >= 0.0 && p.xi.iter().all(|&x| x >= 0.0), "weights must be nonnegative")?;
    ensure(p.kappa > 0.0 && p.cutoff > 0, "kappa and the cutoff must be positive")?;
    ensure(p.max_mode >= 0 && p.grid > 2 * p.max_mode as usize, "grid must resolve the compared modes")?;
    ensure(p.tolerance > 0.0, "tolerance must be positive")?;
    let schemes = p.schemes.iter().map(SchemeConfig::build).collect::<anyhow::Result<Vec<_>>>()?;
    let check = FourierCheck {
        params: CutoffParams { xi0: p.xi0, xi: p.xi.clone(), kappa: p.kappa, p: p.p, cutoff: p.cutoff },
        grid: p.grid,
        max_mode: p.max_mode,
        tolerance: p.tolerance,
    };
    Ok(Plan::new(Some(p.cutoff), move |ctx| {
        let table = if ctx.sensitivity { flipped_relation } else { relation };
        let mut rows = Vec::new();
        for &family in &p.families {
            for (label, scheme) in &schemes {
                for &n in &p.sizes {
                    for context in contexts(family, n) {
                        for i in 0..n - 1 {
                            let rel = table(context[i], context[i + 1])?;
                            let r = check_relation(&context, (i, i + 1), &rel, scheme, &check)?;
                            let parameters = format!(
                                "scheme={label}; pair=({i},{}); N={}; grid={}; |m|<={}; scale={:.6e}; exact={}",
                                i + 1,
                                p.cutoff,
                                p.grid,
                                p.max_mode,
                                r.scale,
                                r.exact
                            );
                            let bound = r.tolerance * r.scale.max(1.0);
                            rows.push(CheckRow {
                                name: format!("relation[{}|{label}|{i},{}]", word(&context), i + 1),
                                parameters,
                                value: r.residual,
                                reference: 0.0,
                                tolerance: bound,
                                rule: format!(
                                    "max Fourier residual <= {:e} * max(1, max Fourier coefficient of the commutator)",
                                    r.tolerance
                                ),
                                stderr: None,
                                passed: r.passed,
                            });
                        }
                    }
                }
            }
        }
        Ok(rows)
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Hermiticity {
    contexts: Vec<Vec<String>>,
    schemes: Vec<SchemeConfig>,
}

pub(super) fn hermiticity(config: &ExperimentConfig) -> anyhow::Result<Plan> {
    let p: Hermiticity = params(config)?;
    let contexts = p
        .contexts
        .iter()
        .map(|c| {
            let kinds = c.iter().map(|s| s.parse::<CurrentKind>()).collect::<Result<Vec<_>, _>>()?;
            ensure(!kinds.is_empty(), "contexts must be nonempty")?;
            ensure(kinds.iter().all(|k| k.algebra() == kinds[0].algebra()), "a context mixes families")?;
            Ok(kinds)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let schemes = p.schemes.iter().map(SchemeConfig::build).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Plan::new(None, move |_| {
        let mut rows = Vec::new();
        for (label, scheme) in &schemes {
            for context in &contexts {
                let r = hermiticity_check(context, scheme)?;
                let mut parameters = format!("scheme={label}; terms={}", r.terms);
                if let Some((key, conj, partner)) = &r.mismatch {
                    parameters = format!("{parameters}; mismatch={key}: {conj} vs {}", partner.as_deref().unwrap_or("absent"));
                }
                rows.push(CheckRow::holds(format!("conjugate_reversal[{}|{label}]", word(context)), parameters, r.passed));
            }
        }
        Ok(rows)
    }))
}
