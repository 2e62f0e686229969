use std::collections::BTreeMap;

use loopax::diagram_engine::{
    check_relation, classify, commutator_correlator, correlator_direct, correlator_exact, correlator_regularized, enumerate_diagrams,
    evaluate_regularized, hermiticity_check, max_fourier, relation, renormalize, CurrentKind, CutoffParams, DeltaMode, Diagram,
    DistributionalExpression, FieldParams, FourierCheck, Insertion, LoopScheme, Operator, Topology,
};
use loopax::exact::{rat, rational_point, Field, QI};
use loopax::gauss_field::{Algebra, ExactFock, FockOrientation, FockParams, ModeSpace, WeightSequence};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use CurrentKind::*;

fn exact_setup(algebra: Algebra) -> (ModeSpace, ExactFock) {
    let xi0 = (algebra == Algebra::A).then(|| rat(1, 7));
    let space = ModeSpace::new(algebra, xi0, vec![rat(1, 3), rat(1, 5)]).unwrap();
    let orientation = match algebra {
        Algebra::K => FockOrientation::Reflected,
        Algebra::A => FockOrientation::Standard,
    };
    let fock = ExactFock { kappa: QI::from_ratio(2, 3), p: QI::from_ratio(1, 2), orientation };
    (space, fock)
}

fn points() -> Vec<QI> {
    vec![
        rational_point(rat(1, 2), 3, 4, 5).unwrap(),
        rational_point(rat(2, 3), -5, 12, 13).unwrap(),
        rational_point(rat(3, 4), 8, -15, 17).unwrap(),
    ]
}

fn family_context() -> impl Strategy<Value = Vec<CurrentKind>> {
    (any::<bool>(), prop::collection::vec(0usize..3, 1..=4)).prop_map(|(j, idx)| {
        let fam = if j { CurrentKind::J_FAMILY } else { CurrentKind::EFH_FAMILY };
        idx.into_iter().map(|k| fam[k]).collect()
    })
}

/// Cyclomatic number `E − V + 1` of each weakly connected component.
fn cyclomatic_numbers(d: &Diagram) -> Vec<usize> {
    let n = d.len();
    let mut comp: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for e in &d.edges {
            let m = comp[e.source].min(comp[e.target]);
            for v in [e.source, e.target] {
                if comp[v] != m {
                    comp[v] = m;
                    changed = true;
                }
            }
        }
    }
    let mut stats: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &c in &comp {
        stats.entry(c).or_default().0 += 1;
    }
    for e in &d.edges {
        stats.get_mut(&comp[e.source]).unwrap().1 += 1;
    }
    stats.values().map(|&(v, e)| e + 1 - v).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagram_sum_equals_direct_normal_ordering(ctx in family_context().prop_filter("n ≤ 3", |c| c.len() <= 3)) {
        let (space, fock) = exact_setup(ctx[0].algebra());
        let pts = &points()[..ctx.len()];
        let engine = correlator_exact(&ctx, pts, &FieldParams::exact(&space, &fock)).unwrap();
        let direct = correlator_direct(&space, &fock, &ctx, pts).unwrap();
        prop_assert_eq!(engine, direct);
    }

    #[test]
    fn enumerated_diagrams_respect_the_contraction_rules(ctx in family_context()) {
        for d in enumerate_diagrams(&ctx).unwrap() {
            for v in 0..d.len() {
                prop_assert!(d.edges.iter().filter(|e| e.source == v).count() <= 1);
            }
            for e in &d.edges {
                match e.op {
                    Operator::Annihilation => prop_assert!(e.target > e.source),
                    Operator::Creation => prop_assert!(e.target < e.source),
                }
            }
            let cyc = cyclomatic_numbers(&d);
            prop_assert!(cyc.iter().all(|&c| c <= 1));
            let loops = match classify(&d).unwrap() {
                Topology::Tree => 0,
                Topology::OneLoop(_) => 1,
                Topology::Loops(ks) => ks.len(),
            };
            prop_assert_eq!(loops, cyc.iter().sum::<usize>());
            let mut rho: Vec<usize> = d.wavy.iter().flat_map(|&(l, r)| [l, r]).collect();
            prop_assert!(rho.iter().all(|&v| d.vertices[v].has_rho()));
            rho.sort_unstable();
            rho.dedup();
            prop_assert_eq!(rho.len(), 2 * d.wavy.len());
            if ctx[0].algebra() == Algebra::K {
                let charges: i32 = d.vertices.iter().map(|t| t.charge()).sum();
                prop_assert_eq!(charges, 0);
            }
        }
    }
}

fn k_numeric(delta: DeltaMode) -> FieldParams<Complex64> {
    let w = WeightSequence::new(Algebra::K, None, vec![0.25]).unwrap();
    FieldParams::numeric(&w, FockParams::new(0.7, 0.4).unwrap(), FockOrientation::Reflected, delta)
}

#[test]
fn two_cycle_grows_like_the_square_of_the_coincident_delta() {
    let params = k_numeric(DeltaMode::Closed);
    let d = enumerate_diagrams(&[JPlus, JMinus]).unwrap().into_iter().find(|d| classify(d).unwrap() == Topology::OneLoop(2)).unwrap();
    let value = |r: f64| evaluate_regularized(&d, &[Complex64::from_polar(r, 0.4), Complex64::from_polar(r, 0.4)], &params).unwrap().norm();
    let (r1, r2) = (0.99_f64, 0.999_f64);
    let slope = (value(r2) / value(r1)).ln() / ((1.0 - r2 * r2) / (1.0 - r1 * r1)).ln();
    assert!((slope + 2.0).abs() < 0.01, "growth exponent {slope}");
}

/// `(1/2π)∫ f(u, 0) e^{−imu} du` on an `M`-point grid.
fn pinned_coefficient(f: impl Fn(f64) -> Complex64, m: i32, grid: usize) -> Complex64 {
    let step = std::f64::consts::TAU / grid as f64;
    (0..grid).map(|k| f(k as f64 * step) * Complex64::from_polar(1.0, -(m as f64) * k as f64 * step)).sum::<Complex64>() / grid as f64
}

#[test]
fn tree_correlators_converge_to_the_renormalized_form_at_the_boundary() {
    let params = k_numeric(DeltaMode::Closed);
    let kinds = [JPlus, JMinus];
    let expr = renormalize(&Insertion::sequence(&kinds), &LoopScheme::DropLoops, FockOrientation::Reflected).unwrap();
    let cutoff = CutoffParams { xi0: 0.0, xi: vec![0.25], kappa: 0.7, p: 0.4, cutoff: 64 };
    let limits = expr.fourier_coefficients(&cutoff, &[0, 1], 256, 2);
    for m in [0, 1, -2] {
        let limit = limits.iter().find(|(mode, _)| mode[0] == m).unwrap().1;
        let at = |r: f64| {
            pinned_coefficient(
                |u| {
                    let pts = [Complex64::from_polar(r, u), Complex64::from_polar(r, 0.0)];
                    correlator_regularized(&kinds, &pts, &params, true).unwrap()
                },
                m,
                1 << 15,
            )
        };
        let errors: Vec<f64> = [0.9, 0.99, 0.999].into_iter().map(|r| (at(r) - limit).norm()).collect();
        assert!(errors[1] < errors[0] && errors[2] < errors[1], "mode {m}: {errors:?}");
        assert!(errors[2] < 2e-2 * limit.norm().max(1.0), "mode {m}: {errors:?} vs {limit}");
    }
}

#[test]
fn cartan_self_commutator_is_exactly_the_central_term() {
    for (kind, orientation) in [(J3, FockOrientation::Reflected), (H, FockOrientation::Standard)] {
        for scheme in [LoopScheme::DropLoops, LoopScheme::unit_weights(2)] {
            let lhs = commutator_correlator(&[kind, kind], (0, 1), &scheme, orientation).unwrap();
            let expected =
                DistributionalExpression::one(kind.algebra(), orientation).times_delta(0, 1, 1, &(QI::from_int(-8) * QI::i()), 1);
            assert_eq!(lhs, expected);
        }
    }
}

#[test]
fn central_terms_vanish_without_the_heisenberg_coupling() {
    let check = |kappa: f64| FourierCheck {
        params: CutoffParams { xi0: 0.1, xi: vec![0.25], kappa, p: 0.4, cutoff: 16 },
        grid: 128,
        max_mode: 3,
        tolerance: 1e-8,
    };
    for (x, y, orientation) in
        [(J3, J3, FockOrientation::Reflected), (JPlus, JMinus, FockOrientation::Reflected), (E, F, FockOrientation::Standard)]
    {
        let lhs = commutator_correlator(&[x, y], (0, 1), &LoopScheme::DropLoops, orientation).unwrap();
        assert!(max_fourier(&lhs, &[0, 1], &check(0.7)) > 1.0);
        let rel = relation(x, y).unwrap();
        let r = check_relation(&[x, y], (0, 1), &rel, &LoopScheme::DropLoops, &check(0.0)).unwrap();
        assert!(r.passed);
        if rel.current.is_none() {
            assert!(r.scale < 1e-12, "[{x},{y}] at κ = 0 leaves {}", r.scale);
        }
    }
}

#[test]
fn hermiticity_holds_for_arbitrary_real_loop_weights() {
    let weights: BTreeMap<usize, BigRational> = [(2, rat(3, 2)), (3, rat(-1, 3)), (4, rat(2, 1))].into();
    let scheme = LoopScheme::LoopWeights(weights);
    for ctx in [vec![JPlus, JMinus], vec![JPlus, JMinus, JPlus, JMinus], vec![J3, JPlus, JMinus], vec![J3, J3, J3], vec![E, F, H, E]] {
        let r = hermiticity_check(&ctx, &scheme).unwrap();
        assert!(r.passed, "{ctx:?}: {:?}", r.mismatch);
    }
}
