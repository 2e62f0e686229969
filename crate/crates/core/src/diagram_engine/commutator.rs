//! Commutators of currents inside renormalized correlators and the Hermiticity of the
//! renormalized form.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::currents::CurrentKind;
use super::expression::{renormalize, CutoffParams, DistributionalExpression, Insertion, LoopScheme, TermKey};
use crate::error::{invalid, Error, Result};
use crate::exact::{Field, QI};
use crate::gauss_field::FockOrientation;

/// `[X(u), Y(v)] = c_Z · Z(v) δ(u − v) + c_κ · κ δ′(u − v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub left: CurrentKind,
    pub right: CurrentKind,
    pub current: Option<(CurrentKind, QI)>,
    pub central: QI,
}

impl Relation {
    /// `[Y, X]` from `[X, Y]`: the current term flips sign, `δ′(u − v)` is odd so the central
    /// coefficient stays.
    fn reversed(&self) -> Self {
        Self { left: self.right, right: self.left, current: self.current.clone().map(|(z, c)| (z, -c)), central: self.central.clone() }
    }
}

fn table(left: CurrentKind, right: CurrentKind, flipped: bool) -> Result<Relation> {
    use CurrentKind::*;
    let i = QI::i();
    let int = QI::from_int;
    let rel = |current: Option<(CurrentKind, QI)>, central: QI| Relation { left, right, current, central };
    if left.algebra() != right.algebra() {
        return Err(invalid("relation", "currents of different families"));
    }
    let r = match (left, right) {
        (JPlus, JMinus) => rel(Some((J3, i.clone())), int(4) * i),
        (J3, J3) => rel(None, int(-8) * i),
        (J3, JPlus) => rel(Some((JPlus, if flipped { int(2) } else { int(-2) } * i)), QI::zero()),
        (J3, JMinus) => rel(Some((JMinus, if flipped { int(-2) } else { int(2) } * i)), QI::zero()),
        (E, F) => rel(Some((H, QI::one())), int(-4) * i),
        (H, H) => rel(None, if flipped { int(8) } else { int(-8) } * i),
        (H, E) => rel(Some((E, int(2))), QI::zero()),
        (H, F) => rel(Some((F, int(-2))), QI::zero()),
        (JPlus, JPlus) | (JMinus, JMinus) | (E, E) | (F, F) => rel(None, QI::zero()),
        _ => return table(right, left, flipped).map(|r| r.reversed()),
    };
    Ok(r)
}

/// The relation satisfied by the renormalized currents.
pub fn relation(left: CurrentKind, right: CurrentKind) -> Result<Relation> {
    table(left, right, false)
}

/// [`relation`] with the signs of `[J³, J^±]` and of the `[H, H]` central term reversed, a
/// control that the checks can tell the two apart.
pub fn flipped_relation(left: CurrentKind, right: CurrentKind) -> Result<Relation> {
    table(left, right, true)
}

fn family_orientation(context: &[CurrentKind]) -> Result<FockOrientation> {
    context.first().map(|k| k.fock_orientation()).ok_or_else(|| invalid("context", "no insertions"))
}

fn renormalized(
    insertions: &[Insertion],
    scheme: &LoopScheme,
    orientation: FockOrientation,
    algebra_of: CurrentKind,
) -> Result<DistributionalExpression> {
    if insertions.is_empty() {
        Ok(DistributionalExpression::one(algebra_of.algebra(), orientation))
    } else {
        renormalize(insertions, scheme, orientation)
    }
}

fn check_pair(context: &[CurrentKind], pair: (usize, usize)) -> Result<()> {
    let (i, j) = pair;
    if j != i + 1 || j >= context.len() {
        return Err(Error::NonAdjacentPair(i, j));
    }
    Ok(())
}

/// `⟨… [φ_i(u_i), φ_j(u_j)] …⟩` as the difference of the two renormalized orderings; angles
/// keep the labels of the original positions.
pub fn commutator_correlator(
    context: &[CurrentKind],
    pair: (usize, usize),
    scheme: &LoopScheme,
    orientation: FockOrientation,
) -> Result<DistributionalExpression> {
    check_pair(context, pair)?;
    let ordered = Insertion::sequence(context);
    let mut swapped = ordered.clone();
    swapped.swap(pair.0, pair.1);
    Ok(renormalize(&ordered, scheme, orientation)?.sub(&renormalize(&swapped, scheme, orientation)?))
}

/// The right-hand side predicted by `rel` for the pair at `pair`.
pub fn relation_rhs(
    context: &[CurrentKind],
    pair: (usize, usize),
    rel: &Relation,
    scheme: &LoopScheme,
    orientation: FockOrientation,
) -> Result<DistributionalExpression> {
    check_pair(context, pair)?;
    let (i, j) = pair;
    if (context[i], context[j]) != (rel.left, rel.right) {
        return Err(invalid("relation", "does not match the marked pair"));
    }
    let ordered = Insertion::sequence(context);
    let mut out = DistributionalExpression::zero(context[0].algebra(), orientation);
    if let Some((z, c)) = &rel.current {
        let mut replaced = ordered.clone();
        replaced[j] = Insertion { kind: *z, id: j };
        replaced.remove(i);
        let expr = renormalized(&replaced, scheme, orientation, context[0])?;
        out.add(&expr.times_delta(i, j, 0, c, 0));
    }
    if !rel.central.is_zero() {
        let mut removed = ordered;
        removed.drain(i..=j);
        let expr = renormalized(&removed, scheme, orientation, context[0])?;
        out.add(&expr.times_delta(i, j, 1, &rel.central, 1));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub context: Vec<CurrentKind>,
    pub pair: (usize, usize),
    /// Both sides agree as exact symbolic expressions.
    pub exact: bool,
    /// Largest Fourier-coefficient magnitude of the difference at the cutoff.
    pub residual: f64,
    /// Largest Fourier-coefficient magnitude of the commutator itself.
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Fourier grid and comparison settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCheck {
    pub params: CutoffParams,
    pub grid: usize,
    pub max_mode: i32,
    pub tolerance: f64,
}

pub fn max_fourier(expr: &DistributionalExpression, labels: &[usize], check: &FourierCheck) -> f64 {
    expr.fourier_coefficients(&check.params, labels, check.grid, check.max_mode)
        .into_iter()
        .map(|(_, c): (Vec<i32>, Complex64)| c.norm())
        .fold(0.0, f64::max)
}

/// Compares the commutator of the pair with `rel` by Fourier coefficients at the cutoff.
pub fn check_relation(
    context: &[CurrentKind],
    pair: (usize, usize),
    rel: &Relation,
    scheme: &LoopScheme,
    check: &FourierCheck,
) -> Result<RelationCheck> {
    let orientation = family_orientation(context)?;
    let lhs = commutator_correlator(context, pair, scheme, orientation)?;
    let rhs = relation_rhs(context, pair, rel, scheme, orientation)?;
    let diff = lhs.sub(&rhs);
    let labels: Vec<usize> = (0..context.len()).collect();
    let residual = if diff.is_empty() { 0.0 } else { max_fourier(&diff, &labels, check) };
    let scale = max_fourier(&lhs, &labels, check);
    Ok(RelationCheck {
        context: context.to_vec(),
        pair,
        exact: diff.is_empty(),
        residual,
        scale,
        tolerance: check.tolerance,
        passed: residual <= check.tolerance * scale.max(1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermiticityReport {
    pub context: Vec<CurrentKind>,
    pub terms: usize,
    pub passed: bool,
    /// First disagreement: the term of the conjugated correlator and the partner expression's
    /// coefficient for the same key (`None` when absent).
    pub mismatch: Option<(String, String, Option<String>)>,
}

/// First term where `conj(forward)` and `partner` differ: the key, the conjugated coefficient
/// and the partner's coefficient (`None` when the partner lacks the term).
pub fn conjugate_mismatch(
    forward: &DistributionalExpression,
    partner: &DistributionalExpression,
) -> Option<(String, String, Option<String>)> {
    let conj = forward.conj();
    let describe = |k: &TermKey| serde_json::to_string(k).expect("key serializes");
    let show = |c: &QI| format!("{} + {}i", c.re, c.im);
    let partner_terms: BTreeMap<&TermKey, &QI> = partner.iter().collect();
    let conj_terms: BTreeMap<&TermKey, &QI> = conj.iter().collect();
    let first = conj
        .iter()
        .find(|(k, c)| partner_terms.get(k) != Some(c))
        .map(|(k, c)| (describe(k), show(c), partner_terms.get(k).map(|c| show(c))))
        .or_else(|| partner.iter().find(|(k, _)| !conj_terms.contains_key(k)).map(|(k, c)| (describe(k), "0".to_string(), Some(show(c)))));
    first
}

/// `conj⟨φ₁…φ_n⟩ = (−1)ⁿ ⟨φ̃_n…φ̃₁⟩` term by term, with angles following their insertions.
pub fn hermiticity_check(context: &[CurrentKind], scheme: &LoopScheme) -> Result<HermiticityReport> {
    let orientation = family_orientation(context)?;
    let forward = renormalize(&Insertion::sequence(context), scheme, orientation)?;
    let reversed: Vec<Insertion> =
        Insertion::sequence(context).into_iter().rev().map(|x| Insertion { kind: x.kind.adjoint_partner(), id: x.id }).collect();
    let sign = if context.len().is_multiple_of(2) { QI::one() } else { -QI::one() };
    let partner = renormalize(&reversed, scheme, orientation)?.scale(&sign);
    let mismatch = conjugate_mismatch(&forward, &partner);
    Ok(HermiticityReport { context: context.to_vec(), terms: forward.len(), passed: mismatch.is_none(), mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CurrentKind::*;

    fn check() -> FourierCheck {
        FourierCheck {
            params: CutoffParams { xi0: 0.5, xi: vec![0.25], kappa: 0.7, p: 0.4, cutoff: 16 },
            grid: 128,
            max_mode: 3,
            tolerance: 1e-8,
        }
    }

    #[test]
    fn table_is_antisymmetric() {
        let pairs = CurrentKind::J_FAMILY.iter().flat_map(|&x| CurrentKind::J_FAMILY.map(|y| (x, y)));
        for (x, y) in pairs {
            let r = relation(x, y).unwrap();
            let s = relation(y, x).unwrap();
            assert_eq!(r.central, s.central);
            assert_eq!(r.current.map(|(_, c)| c), s.current.map(|(_, c)| -c));
        }
    }

    #[test]
    fn non_adjacent_pair_is_rejected() {
        let r = commutator_correlator(&[J3, J3, J3], (0, 2), &LoopScheme::DropLoops, FockOrientation::Reflected);
        assert!(matches!(r, Err(Error::NonAdjacentPair(0, 2))));
    }

    #[test]
    fn cartan_pair_closes_on_the_central_term() {
        let rel = relation(J3, J3).unwrap();
        let c = check_relation(&[J3, J3], (0, 1), &rel, &LoopScheme::DropLoops, &check()).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn mismatch_names_the_offending_term() {
        let ins = Insertion::sequence(&[JPlus, JMinus]);
        let e = renormalize(&ins, &LoopScheme::DropLoops, FockOrientation::Reflected).unwrap();
        assert!(conjugate_mismatch(&e, &e.conj()).is_none());
        let (key, _) = e.iter().next().unwrap();
        let mut broken = e.clone();
        broken.add_term(key.clone(), QI::i());
        let (found, _, partner) = conjugate_mismatch(&e, &broken.conj()).unwrap();
        assert_eq!(found, serde_json::to_string(key).unwrap());
        assert!(partner.is_some());
    }

    #[test]
    fn single_cartan_current_is_anti_hermitian() {
        let r = hermiticity_check(&[J3], &LoopScheme::DropLoops).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
