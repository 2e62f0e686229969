//! Regularized diagram values inside the disk.
//!
//! Angle derivatives are carried by multilinear jets: a differentiated slot at `z = re^{iu}`
//! becomes `z(1 + iε)`, `z̄(1 − iε)`, and the mixed top component of the product is the value.

use num_complex::Complex64;
use num_rational::BigRational;

use super::currents::{contraction_constant, CurrentKind};
use super::enumerate::{classify, enumerate_diagrams, Diagram, Topology};
use crate::error::{invalid, Error, Result};
use crate::exact::{ExpSum, Field, Jet, QI};
use crate::gauss_field::{Algebra, ExactFock, FockOrientation, FockParams, ModeSpace, WeightSequence};

/// How `δ(z, w)` and the Heisenberg two-point function are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    /// Geometric series in closed form (needs `|z w̄| < 1`).
    Closed,
    /// Mode sums truncated at `N`.
    Truncated(usize),
}

/// Model data over a scalar field: weights, Heisenberg parameters, summation mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldParams<F> {
    pub algebra: Algebra,
    pub xi0: F,
    pub xi: Vec<F>,
    pub kappa: F,
    pub p: F,
    pub orientation: FockOrientation,
    pub delta: DeltaMode,
}

impl FieldParams<Complex64> {
    pub fn numeric(w: &WeightSequence<f64>, fock: FockParams<f64>, orientation: FockOrientation, delta: DeltaMode) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self {
            algebra: w.algebra,
            xi0: c(w.xi0),
            xi: w.xi.iter().map(|&x| c(x)).collect(),
            kappa: c(fock.kappa),
            p: c(fock.p),
            orientation,
            delta,
        }
    }
}

impl FieldParams<QI> {
    /// Exact parameters matching a mode space; sums are truncated at its cutoff.
    pub fn exact(space: &ModeSpace, fock: &ExactFock) -> Self {
        let q = |x: &BigRational| QI::new(x.clone(), BigRational::from_integer(0.into()));
        Self {
            algebra: space.algebra,
            xi0: q(&space.xi0),
            xi: space.xi.iter().map(q).collect(),
            kappa: fock.kappa.clone(),
            p: fock.p.clone(),
            orientation: fock.orientation,
            delta: DeltaMode::Truncated(space.cutoff()),
        }
    }
}

/// `(z, z̄)` as jets, moved along the angle in direction `dir` when given.
pub(crate) fn point_jets<F: Field>(z: &F, dirs: u32, dir: Option<u32>) -> (Jet<F>, Jet<F>) {
    let zb = z.conj();
    match dir {
        Some(d) => (Jet::linear(dirs, z.clone(), d, F::i() * z.clone()), Jet::linear(dirs, zb.clone(), d, -(F::i() * zb))),
        None => (Jet::constant(dirs, z.clone()), Jet::constant(dirs, zb)),
    }
}

fn geometric_sum<F: Field>(q: &Jet<F>, from: u32, to: u32) -> Jet<F> {
    let mut power = q.powu(from);
    let mut sum = power.clone();
    for _ in from..to {
        power = power.mul(q);
        sum = sum.add(&power);
    }
    sum
}

/// `δ(z, w) = Σ_{n≥0} (z w̄)ⁿ + Σ_{n>0} (z̄ w)ⁿ` for a fixed `z` and a jet `w`.
pub(crate) fn delta_jet<F: Field>(z: &F, w: &Jet<F>, wb: &Jet<F>, mode: DeltaMode) -> Jet<F> {
    let q1 = wb.scale(z);
    let q2 = w.scale(&z.conj());
    let one = Jet::constant(q1.dirs(), F::one());
    match mode {
        DeltaMode::Truncated(n) => {
            let first = geometric_sum(&q1, 0, n as u32);
            if n == 0 {
                first
            } else {
                first.add(&geometric_sum(&q2, 1, n as u32))
            }
        }
        DeltaMode::Closed => one.sub(&q1).recip().add(&q2.div(&one.sub(&q2))),
    }
}

/// `Σ_n 2κn qⁿ` (truncated) or `2κq/(1 − q)²` for the oriented pairing `q`.
pub(crate) fn wavy_value<F: Field>(zl: &F, zr: &F, kappa: &F, orientation: FockOrientation, mode: DeltaMode) -> F {
    let q = orientation.pairing(zl, zr);
    let two_kappa = F::from_int(2) * kappa.clone();
    match mode {
        DeltaMode::Truncated(n) => {
            let mut power = F::one();
            let mut sum = F::zero();
            for k in 1..=n as i64 {
                power = power * q.clone();
                sum = sum + F::from_int(k) * power.clone();
            }
            two_kappa * sum
        }
        DeltaMode::Closed => {
            let d = F::one() - q.clone();
            two_kappa * q / (d.clone() * d)
        }
    }
}

/// Exponent of `⟨Π exp^{σ_k}(z_k)⟩`: `∓½ Σ_{k,l} σ_k σ_l C(z_k, z_l)` with
/// `C(z, w) = [2ξ₀] + Σ_n ξ_n (z̄ⁿwⁿ + zⁿw̄ⁿ)` (minus sign for `K`).
pub(crate) fn correlator_exponent<F: Field>(algebra: Algebra, xi0: &F, xi: &[F], z: &[Jet<F>], zb: &[Jet<F>], charges: &[i8]) -> Jet<F> {
    let dirs = z.first().map_or(0, Jet::dirs);
    let powers = |v: &Jet<F>| {
        let mut out = Vec::with_capacity(xi.len());
        let mut p = v.clone();
        for _ in 0..xi.len() {
            out.push(p.clone());
            p = p.mul(v);
        }
        out
    };
    let zp: Vec<Vec<Jet<F>>> = z.iter().map(powers).collect();
    let zbp: Vec<Vec<Jet<F>>> = zb.iter().map(powers).collect();
    let zero_mode = match algebra {
        Algebra::A => F::from_int(2) * xi0.clone(),
        Algebra::K => F::zero(),
    };
    let mut total = Jet::constant(dirs, F::zero());
    for k in 0..z.len() {
        for l in k..z.len() {
            let weight = F::from_int(charges[k] as i64 * charges[l] as i64 * if k == l { 1 } else { 2 });
            let mut c = Jet::constant(dirs, zero_mode.clone());
            for (n, x) in xi.iter().enumerate() {
                let term = zbp[k][n].mul(&zp[l][n]).add(&zp[k][n].mul(&zbp[l][n]));
                c = c.add(&term.scale(x));
            }
            total = total.add(&c.scale(&weight));
        }
    }
    let half = match algebra {
        Algebra::A => F::from_ratio(1, 2),
        Algebra::K => F::from_ratio(-1, 2),
    };
    total.scale(&half)
}

/// Value of one diagram as `coefficient · exp(exponent)`, returned as `(exponent, coefficient)`.
pub fn diagram_parts<F: Field>(d: &Diagram, points: &[F], params: &FieldParams<F>) -> Result<(F, F)> {
    if points.len() != d.len() {
        return Err(Error::GridMismatch { expected: d.len(), found: points.len() });
    }
    if d.algebra() != params.algebra {
        return Err(invalid("params", "weights belong to the other algebra"));
    }
    // One jet direction per differentiated exponential.
    let mut dirs = 0u32;
    let mut slot_dir: Vec<Vec<Option<u32>>> = Vec::with_capacity(d.len());
    for t in &d.vertices {
        slot_dir.push(
            t.slots
                .iter()
                .map(|s| {
                    s.derivative.then(|| {
                        dirs += 1;
                        dirs - 1
                    })
                })
                .collect(),
        );
    }
    let mut zs = Vec::new();
    let mut zbs = Vec::new();
    let mut charges = Vec::new();
    let mut slot_jets: Vec<Vec<(Jet<F>, Jet<F>)>> = Vec::with_capacity(d.len());
    for (v, t) in d.vertices.iter().enumerate() {
        let mut row = Vec::new();
        for (s, slot) in t.slots.iter().enumerate() {
            let (z, zb) = point_jets(&points[v], dirs, slot_dir[v][s]);
            zs.push(z.clone());
            zbs.push(zb.clone());
            charges.push(slot.charge);
            row.push((z, zb));
        }
        slot_jets.push(row);
    }

    let mut coeff = F::one();
    for t in &d.vertices {
        coeff = coeff * F::from_qi(&t.coefficient) * params.kappa.powu(t.kappa_power);
    }
    let c: F = contraction_constant(params.algebra);
    let mut product = Jet::constant(dirs, coeff);
    for e in &d.edges {
        let mut line = Jet::constant(dirs, F::zero());
        for (s, slot) in d.vertices[e.target].slots.iter().enumerate() {
            let (w, wb) = &slot_jets[e.target][s];
            let weight = F::from_int(e.op.sign() * slot.charge as i64) * c.clone();
            line = line.add(&delta_jet(&points[e.source], w, wb, params.delta).scale(&weight));
        }
        product = product.mul(&line);
    }
    let mut scalar = params.p.powu(d.unpaired_rho() as u32);
    for &(l, r) in &d.wavy {
        scalar = scalar * wavy_value(&points[l], &points[r], &params.kappa, params.orientation, params.delta);
    }
    let exponent = correlator_exponent(params.algebra, &params.xi0, &params.xi, &zs, &zbs, &charges);
    let (value, factor) = exponent.exp_split();
    let top = product.mul(&factor).top().clone() * scalar;
    Ok((value, top))
}

fn check_regime(d: &Diagram, points: &[Complex64], params: &FieldParams<Complex64>) -> Result<()> {
    if params.delta != DeltaMode::Closed {
        return Ok(());
    }
    let on_circle = |v: usize| (points[v].norm() - 1.0).abs() < 1e-12;
    for e in &d.edges {
        if on_circle(e.source) && on_circle(e.target) {
            return Err(Error::Divergence(e.source, e.target));
        }
    }
    for &(l, r) in &d.wavy {
        if on_circle(l) && on_circle(r) {
            return Err(Error::Divergence(l, r));
        }
    }
    Ok(())
}

fn validate_points(points: &[Complex64]) -> Result<()> {
    for z in points {
        let r = z.norm();
        if !(r > 0.0 && r <= 1.0 + 1e-12) {
            return Err(invalid("radius", format!("{r} is outside (0, 1]")));
        }
    }
    Ok(())
}

/// Numeric value of one diagram; lines or pairings between two points on the unit circle are
/// reported as divergences.
pub fn evaluate_regularized(d: &Diagram, points: &[Complex64], params: &FieldParams<Complex64>) -> Result<Complex64> {
    validate_points(points)?;
    check_regime(d, points, params)?;
    let (exponent, coeff) = diagram_parts(d, points, params)?;
    Ok(coeff * exponent.exp())
}

/// Sum over diagrams; `trees_only` drops every diagram with a cycle.
pub fn correlator_regularized(
    kinds: &[CurrentKind],
    points: &[Complex64],
    params: &FieldParams<Complex64>,
    trees_only: bool,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for d in enumerate_diagrams(kinds)? {
        if trees_only && classify(&d)? != Topology::Tree {
            continue;
        }
        total += evaluate_regularized(&d, points, params)?;
    }
    Ok(total)
}

/// Exact correlator as a sum of exponentials.
pub fn correlator_exact(kinds: &[CurrentKind], points: &[QI], params: &FieldParams<QI>) -> Result<ExpSum> {
    let mut total = ExpSum::zero();
    for d in enumerate_diagrams(kinds)? {
        let (exponent, coeff) = diagram_parts(&d, points, params)?;
        total.add_term(coeff, exponent);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram_engine::currents::CurrentKind::*;

    fn k_params(delta: DeltaMode) -> FieldParams<Complex64> {
        let w = WeightSequence::geometric(Algebra::K, None, 0.3, 3).unwrap();
        FieldParams::numeric(&w, FockParams::new(1.0, 0.5).unwrap(), FockOrientation::Reflected, delta)
    }

    #[test]
    fn closed_delta_matches_geometric_oracle() {
        // r = 0.5 at angles 0 and π: 1/1.25 − 0.25/1.25 = 0.6.
        let z = Complex64::new(0.5, 0.0);
        let w = Complex64::from_polar(0.5, std::f64::consts::PI);
        let (wj, wbj) = point_jets(&w, 0, None);
        let v = delta_jet(&z, &wj, &wbj, DeltaMode::Closed);
        assert!((v.value() - Complex64::new(0.6, 0.0)).norm() < 1e-15);
        let t = delta_jet(&z, &wj, &wbj, DeltaMode::Truncated(60));
        assert!((t.value() - Complex64::new(0.6, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lines_collapse_as_radii_vanish() {
        let tiny = Complex64::new(1e-9, 0.0);
        let (wj, wbj) = point_jets(&Complex64::from_polar(1e-9, 2.0), 0, None);
        assert!((delta_jet(&tiny, &wj, &wbj, DeltaMode::Closed).value() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let g = wavy_value(&tiny, &tiny, &Complex64::new(1.0, 0.0), FockOrientation::Standard, DeltaMode::Closed);
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn two_circle_points_joined_by_a_line_diverge() {
        let params = k_params(DeltaMode::Closed);
        let d = enumerate_diagrams(&[JPlus, JMinus]).unwrap().into_iter().find(|d| !d.edges.is_empty()).unwrap();
        let pts = [Complex64::from_polar(1.0, 0.3), Complex64::from_polar(1.0, 1.0)];
        assert!(matches!(evaluate_regularized(&d, &pts, &params), Err(Error::Divergence(_, _))));
        let inside = [Complex64::from_polar(0.9, 0.3), Complex64::from_polar(1.0, 1.0)];
        assert!(evaluate_regularized(&d, &inside, &params).is_ok());
        assert!(evaluate_regularized(&d, &[Complex64::new(1.5, 0.0), inside[1]], &params).is_err());
    }
}
