//! Renormalized correlators on the circle as finite sums of
//! `coefficient · κᵃ pᵇ · Π δ^{(d)}(u_i − u_j) · smooth(u)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::currents::{contraction_constant, CurrentKind};
use super::enumerate::{cycles, enumerate_diagrams};
use super::evaluate::{correlator_exponent, point_jets};
use crate::error::{invalid, Error, Result};
use crate::exact::{qi_to_f64, Field, QI};
use crate::gauss_field::{Algebra, FockOrientation};

/// A current placed at the angle labelled `id`; list order is operator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Insertion {
    pub kind: CurrentKind,
    pub id: usize,
}

impl Insertion {
    /// Insertions labelled by their positions.
    pub fn sequence(kinds: &[CurrentKind]) -> Vec<Insertion> {
        kinds.iter().enumerate().map(|(id, &kind)| Insertion { kind, id }).collect()
    }
}

/// `δ^{(order)}(u_left − u_right)` with `left < right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaFactor {
    pub left: usize,
    pub right: usize,
    pub order: u32,
}

impl DeltaFactor {
    /// `δ^{(order)}(u_a − u_b) = sign · δ^{(order)}(u_left − u_right)`.
    pub fn oriented(a: usize, b: usize, order: u32) -> (Self, i64) {
        if a < b {
            (Self { left: a, right: b, order }, 1)
        } else {
            (Self { left: b, right: a, order }, if order.is_multiple_of(2) { 1 } else { -1 })
        }
    }
}

/// Exponential of the correlator at angle `insertion`, differentiated there when `derivative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SlotRef {
    pub insertion: usize,
    pub charge: i8,
    pub derivative: bool,
}

/// `∂^{flags}⟨Π exp^{σ}(u_slot)⟩ · Π_{(l, r)} g(u_l, u_r)` with the Heisenberg pairing `g`
/// (its `κ` is counted in the monomial).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SmoothFactor {
    pub slots: Vec<SlotRef>,
    pub wavy: Vec<(usize, usize)>,
}

impl SmoothFactor {
    /// Canonical representative and the sign relating it to the input, or `None` when the
    /// factor vanishes identically.
    ///
    /// Opposite plain charges at one angle multiply to `1`, and a derivative moves across such a
    /// neutral pair with a sign. The correlator is even in the charges. Neutral pairs alone form
    /// a Gaussian moment of `∂x`, which vanishes for an odd number of them.
    fn canonical(slots: Vec<SlotRef>, mut wavy: Vec<(usize, usize)>) -> Option<(Self, i64)> {
        let mut ids: Vec<usize> = slots.iter().map(|s| s.insertion).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut reduced = Vec::new();
        let mut dipoles = 0;
        for id in ids {
            let mut here: Vec<SlotRef> = slots.iter().filter(|s| s.insertion == id).copied().collect();
            if let [x, y] = here.as_slice() {
                if x.charge == -y.charge {
                    match (x.derivative, y.derivative) {
                        (false, false) => continue,
                        (true, true) => {}
                        _ => {
                            dipoles += 1;
                            // Derivative on the positive charge.
                            let sign = if (x.derivative && x.charge > 0) || (y.derivative && y.charge > 0) { 1 } else { -1 };
                            reduced.push((here, sign));
                            continue;
                        }
                    }
                }
            }
            here.sort();
            reduced.push((here, 1));
        }
        if dipoles == reduced.len() && dipoles % 2 == 1 {
            return None;
        }
        let normalize = |flip: bool| {
            let mut sign = 1;
            let mut out = Vec::new();
            for (group, s) in &reduced {
                let mut g: Vec<SlotRef> = group.iter().map(|x| SlotRef { charge: if flip { -x.charge } else { x.charge }, ..*x }).collect();
                let is_dipole = g.len() == 2 && g[0].charge == -g[1].charge && g[0].derivative != g[1].derivative;
                if is_dipole {
                    sign *= if flip { -s } else { *s };
                    for x in &mut g {
                        x.derivative = x.charge > 0;
                    }
                }
                out.extend(g);
            }
            out.sort();
            (out, sign)
        };
        let (plain, flipped) = (normalize(false), normalize(true));
        let (slots, sign) = if plain.0 <= flipped.0 { plain } else { flipped };
        wavy.sort();
        Some((Self { slots, wavy }, sign))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermKey {
    pub kappa: u32,
    pub p: u32,
    /// Lengths of the renormalized loops whose weights entered the coefficient.
    pub loops: Vec<usize>,
    pub deltas: Vec<DeltaFactor>,
    pub smooth: SmoothFactor,
}

/// How closed loops of lines are treated on the circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopScheme {
    DropLoops,
    /// `μ_k` per loop length; a `k`-loop becomes `μ_k` times the `δ` chain of its vertices.
    LoopWeights(BTreeMap<usize, BigRational>),
}

impl LoopScheme {
    /// `μ_k = 1` for every length up to `max_len`.
    pub fn unit_weights(max_len: usize) -> Self {
        Self::LoopWeights((2..=max_len).map(|k| (k, BigRational::one())).collect())
    }

    fn weight(&self, k: usize) -> Result<BigRational> {
        match self {
            Self::DropLoops => Ok(BigRational::zero()),
            Self::LoopWeights(m) => m.get(&k).cloned().ok_or(Error::MissingLoopWeight(k)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionalExpression {
    pub algebra: Algebra,
    pub orientation: FockOrientation,
    terms: BTreeMap<TermKey, QI>,
}

impl DistributionalExpression {
    pub fn zero(algebra: Algebra, orientation: FockOrientation) -> Self {
        Self { algebra, orientation, terms: BTreeMap::new() }
    }

    /// The empty correlator `⟨1⟩ = 1`.
    pub fn one(algebra: Algebra, orientation: FockOrientation) -> Self {
        let mut e = Self::zero(algebra, orientation);
        let key =
            TermKey { kappa: 0, p: 0, loops: Vec::new(), deltas: Vec::new(), smooth: SmoothFactor { slots: Vec::new(), wavy: Vec::new() } };
        e.add_term(key, QI::one());
        e
    }

    pub fn add_term(&mut self, key: TermKey, coeff: QI) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_insert_with(QI::zero);
        *slot = slot.clone() + coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn scale(&self, s: &QI) -> Self {
        let mut out = Self::zero(self.algebra, self.orientation);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add(&other.scale(&-QI::one()));
        out
    }

    /// Multiplies every term by `s · κ^{kappa} · δ^{(order)}(u_a − u_b)`.
    pub fn times_delta(&self, a: usize, b: usize, order: u32, s: &QI, kappa: u32) -> Self {
        let (factor, sign) = DeltaFactor::oriented(a, b, order);
        let mut out = Self::zero(self.algebra, self.orientation);
        for (k, c) in &self.terms {
            let mut key = k.clone();
            key.kappa += kappa;
            key.deltas.push(factor);
            key.deltas.sort();
            out.add_term(key, c.clone() * s.clone() * QI::from_int(sign));
        }
        out
    }

    /// Complex conjugate for real `κ, p, μ` and real angles: `δ^{(d)}` and the exponential
    /// correlators are real, and conjugation reverses each Heisenberg pairing.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.algebra, self.orientation);
        for (k, c) in &self.terms {
            let mut key = k.clone();
            let wavy = key.smooth.wavy.iter().map(|&(l, r)| (r, l)).collect();
            key.smooth.wavy = wavy;
            key.smooth.wavy.sort();
            out.add_term(key, Field::conj(c));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &QI)> {
        self.terms.iter()
    }

    /// Angle labels appearing anywhere in the expression.
    pub fn labels(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|k| {
                let d = k.deltas.iter().flat_map(|d| [d.left, d.right]);
                let s = k.smooth.slots.iter().map(|s| s.insertion);
                let w = k.smooth.wavy.iter().flat_map(|&(l, r)| [l, r]);
                d.chain(s).chain(w).collect::<Vec<_>>()
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Value at cutoff `N` for the angles `angles[id]`.
    pub fn evaluate(&self, params: &CutoffParams, angles: &[f64]) -> Complex64 {
        self.numeric(params).value(
            params,
            angles,
            |order, l, r| params.delta(order, angles[l] - angles[r]),
            |l, r| params.pairing(self.orientation, angles[l], angles[r]),
        )
    }

    fn numeric(&self, params: &CutoffParams) -> Numeric<'_> {
        let terms = self
            .terms
            .iter()
            .map(|(key, c)| (key, qi_to_f64(c) * params.kappa.powi(key.kappa as i32) * params.p.powi(key.p as i32)))
            .collect();
        Numeric { algebra: self.algebra, terms }
    }

    /// Fourier coefficients `c(m)` for `|m_k| ≤ max_mode` in every label but the last, which is
    /// pinned at `0` (the expressions are translation invariant), from an `M`-point grid per label.
    pub fn fourier_coefficients(&self, params: &CutoffParams, labels: &[usize], grid: usize, max_mode: i32) -> Vec<(Vec<i32>, Complex64)> {
        let free = labels.len().saturating_sub(1);
        let width = labels.iter().copied().max().map_or(0, |m| m + 1);
        let modes: Vec<Vec<i32>> = (0..free).fold(vec![Vec::new()], |acc, _| {
            acc.into_iter().flat_map(|m| (-max_mode..=max_mode).map(move |k| [m.clone(), vec![k]].concat())).collect()
        });
        let points = grid.pow(free as u32);
        let step = std::f64::consts::TAU / grid as f64;
        // Angle differences are grid multiples, so δ_N and the pairing are tabulated.
        let max_order = self.terms.keys().flat_map(|k| k.deltas.iter().map(|d| d.order)).max().unwrap_or(0);
        let delta_table: Vec<Vec<Complex64>> =
            (0..=max_order).map(|d| (0..grid).map(|k| params.delta(d, k as f64 * step)).collect()).collect();
        let pairing_table: Vec<Complex64> = (0..grid).map(|k| params.pairing(self.orientation, k as f64 * step, 0.0)).collect();
        let twiddle: Vec<Complex64> = (0..grid).map(|k| Complex64::from_polar(1.0, -step * k as f64)).collect();
        let numeric = self.numeric(params);
        // Fixed chunks summed in order keep the result bit-stable across thread counts.
        let chunk = grid.min(points);
        let partial: Vec<Vec<Complex64>> = (0..points.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut acc = vec![Complex64::new(0.0, 0.0); modes.len()];
                let mut angles = vec![0.0; width];
                let mut at = vec![0usize; width];
                for index in c * chunk..((c + 1) * chunk).min(points) {
                    let mut rest = index;
                    for &label in &labels[..free] {
                        at[label] = rest % grid;
                        angles[label] = at[label] as f64 * step;
                        rest /= grid;
                    }
                    let diff = |l: usize, r: usize| (at[l] + grid - at[r]) % grid;
                    let f = numeric.value(
                        params,
                        &angles,
                        |order, l, r| delta_table[order as usize][diff(l, r)],
                        |l, r| pairing_table[diff(l, r)],
                    );
                    for (slot, m) in acc.iter_mut().zip(&modes) {
                        let phase: i64 = m.iter().zip(&labels[..free]).map(|(&mk, &label)| mk as i64 * at[label] as i64).sum();
                        *slot += f * twiddle[phase.rem_euclid(grid as i64) as usize];
                    }
                }
                acc
            })
            .collect();
        let sums = partial.into_iter().fold(vec![Complex64::new(0.0, 0.0); modes.len()], |mut total, part| {
            total.iter_mut().zip(part).for_each(|(t, p)| *t += p);
            total
        });
        modes.into_iter().zip(sums).map(|(m, s)| (m, s / points as f64)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ExpressionJson::from(self)).expect("expression serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: ExpressionJson = serde_json::from_value(value.clone()).map_err(|e| invalid("json", e.to_string()))?;
        parsed.try_into()
    }
}

/// Terms with their numeric prefactors.
struct Numeric<'a> {
    algebra: Algebra,
    terms: Vec<(&'a TermKey, Complex64)>,
}

impl Numeric<'_> {
    fn value(
        &self,
        params: &CutoffParams,
        angles: &[f64],
        delta: impl Fn(u32, usize, usize) -> Complex64,
        pairing: impl Fn(usize, usize) -> Complex64,
    ) -> Complex64 {
        let mut cache: BTreeMap<&[SlotRef], Complex64> = BTreeMap::new();
        let mut total = Complex64::new(0.0, 0.0);
        for &(key, c) in &self.terms {
            let mut v = c;
            for d in &key.deltas {
                v *= delta(d.order, d.left, d.right);
            }
            for &(l, r) in &key.smooth.wavy {
                v *= pairing(l, r);
            }
            let corr =
                *cache.entry(key.smooth.slots.as_slice()).or_insert_with(|| params.correlator(self.algebra, &key.smooth.slots, angles));
            total += v * corr;
        }
        total
    }
}

/// Numeric data for evaluation at cutoff `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffParams {
    pub xi0: f64,
    pub xi: Vec<f64>,
    pub kappa: f64,
    pub p: f64,
    pub cutoff: usize,
}

impl CutoffParams {
    /// `δ_N^{(d)}(θ) = Σ_{|n|≤N} (in)^d e^{inθ}`.
    pub fn delta(&self, order: u32, theta: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        (-(self.cutoff as i64)..=self.cutoff as i64)
            .map(|n| (i * n as f64).powu(order) * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    /// `Σ_{n=1}^{N} 2n qⁿ` with `q = e^{i(u_r − u_l)}` (standard) or `e^{i(u_l − u_r)}` (reflected).
    pub fn pairing(&self, orientation: FockOrientation, ul: f64, ur: f64) -> Complex64 {
        let theta = match orientation {
            FockOrientation::Standard => ur - ul,
            FockOrientation::Reflected => ul - ur,
        };
        (1..=self.cutoff).map(|n| 2.0 * n as f64 * Complex64::from_polar(1.0, n as f64 * theta)).sum()
    }

    pub fn correlator(&self, algebra: Algebra, slots: &[SlotRef], angles: &[f64]) -> Complex64 {
        if algebra == Algebra::K && slots.iter().map(|s| s.charge as i32).sum::<i32>() != 0 {
            return Complex64::new(0.0, 0.0);
        }
        let dirs = slots.iter().filter(|s| s.derivative).count() as u32;
        let mut next_dir = 0;
        let mut zs = Vec::with_capacity(slots.len());
        let mut zbs = Vec::with_capacity(slots.len());
        for s in slots {
            let dir = s.derivative.then(|| {
                next_dir += 1;
                next_dir - 1
            });
            let (z, zb) = point_jets(&Complex64::from_polar(1.0, angles[s.insertion]), dirs, dir);
            zs.push(z);
            zbs.push(zb);
        }
        let charges: Vec<i8> = slots.iter().map(|s| s.charge).collect();
        let xi: Vec<Complex64> = self.xi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let exponent = correlator_exponent(algebra, &Complex64::new(self.xi0, 0.0), &xi, &zs, &zbs, &charges);
        let (value, factor) = exponent.exp_split();
        value.exp() * factor.top()
    }
}

/// Renormalized correlator `⟨φ₁(u₁)…φ_n(u_n)⟩` on the circle.
pub fn renormalize(insertions: &[Insertion], scheme: &LoopScheme, orientation: FockOrientation) -> Result<DistributionalExpression> {
    let Some(first) = insertions.first() else {
        return Err(invalid("insertions", "empty correlator; use DistributionalExpression::one"));
    };
    let algebra = first.kind.algebra();
    let kinds: Vec<CurrentKind> = insertions.iter().map(|x| x.kind).collect();
    let id = |pos: usize| insertions[pos].id;
    let c: QI = contraction_constant(algebra);
    let mut out = DistributionalExpression::zero(algebra, orientation);

    'diagrams: for d in enumerate_diagrams(&kinds)? {
        let mut coeff = QI::one();
        let mut loops = Vec::new();
        let mut deltas = Vec::new();
        let mut on_cycle = vec![false; d.len()];
        for cyc in cycles(&d)? {
            let mu = scheme.weight(cyc.len())?;
            if mu.is_zero() {
                continue 'diagrams;
            }
            coeff *= QI::new(mu, BigRational::zero());
            loops.push(cyc.len());
            let mut members = cyc.vertices.clone();
            members.sort_unstable();
            for w in members.windows(2) {
                deltas.push(DeltaFactor::oriented(id(w[0]), id(w[1]), 0).0);
            }
            for &v in &cyc.vertices {
                on_cycle[v] = true;
            }
        }
        loops.sort_unstable();
        for t in &d.vertices {
            coeff *= t.coefficient.clone();
        }
        let kappa = d.vertices.iter().map(|t| t.kappa_power).sum::<u32>() + d.wavy.len() as u32;
        let p = d.unpaired_rho() as u32;

        // Lines inside loops hit single-slot vertices; the rest choose a slot of their target.
        let mut tree_lines = Vec::new();
        for e in &d.edges {
            if on_cycle[e.source] {
                let slot = d.vertices[e.target].slots[0];
                coeff *= QI::from_int(e.op.sign() * slot.charge as i64) * c.clone();
            } else {
                tree_lines.push(*e);
            }
        }
        let slot_options: Vec<usize> = tree_lines.iter().map(|e| d.vertices[e.target].slots.len()).collect();
        for slot_choice in odometer(&slot_options) {
            let mut coeff = coeff.clone();
            let mut deltas = deltas.clone();
            // Lines waiting for the derivative of the slot they end on.
            let mut pending: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for (k, e) in tree_lines.iter().enumerate() {
                let slot = d.vertices[e.target].slots[slot_choice[k]];
                coeff *= QI::from_int(e.op.sign() * slot.charge as i64) * c.clone();
                if slot.derivative {
                    pending.entry((e.target, slot_choice[k])).or_default().push(k);
                } else {
                    deltas.push(DeltaFactor::oriented(id(e.source), id(e.target), 0).0);
                }
            }
            let derivative_slots: Vec<(usize, usize)> = d
                .vertices
                .iter()
                .enumerate()
                .flat_map(|(v, t)| t.slots.iter().enumerate().filter(|(_, s)| s.derivative).map(move |(j, _)| (v, j)))
                .collect();
            // Product rule: the derivative lands on the smooth part (option 0) or on one line.
            let options: Vec<usize> = derivative_slots.iter().map(|s| 1 + pending.get(s).map_or(0, Vec::len)).collect();
            for placement in odometer(&options) {
                let mut coeff = coeff.clone();
                let mut deltas = deltas.clone();
                let mut smooth_flags = BTreeMap::new();
                for (k, &(v, j)) in derivative_slots.iter().enumerate() {
                    let lines = pending.get(&(v, j)).cloned().unwrap_or_default();
                    smooth_flags.insert((v, j), placement[k] == 0);
                    for (n, &line) in lines.iter().enumerate() {
                        let e = tree_lines[line];
                        let order = u32::from(placement[k] == n + 1);
                        // ∂_{u_t} δ(u_s − u_t) = −δ′(u_s − u_t).
                        let (factor, sign) = DeltaFactor::oriented(id(e.source), id(e.target), order);
                        if order == 1 {
                            coeff *= QI::from_int(-sign);
                        }
                        deltas.push(factor);
                    }
                }
                deltas.sort();
                let slots: Vec<SlotRef> = d
                    .vertices
                    .iter()
                    .enumerate()
                    .flat_map(|(v, t)| {
                        let flags = &smooth_flags;
                        t.slots.iter().enumerate().map(move |(j, s)| SlotRef {
                            insertion: id(v),
                            charge: s.charge,
                            derivative: s.derivative && flags[&(v, j)],
                        })
                    })
                    .collect();
                let wavy = d.wavy.iter().map(|&(l, r)| (id(l), id(r))).collect();
                let Some((smooth, sign)) = SmoothFactor::canonical(slots, wavy) else {
                    continue;
                };
                let key = TermKey { kappa, p, loops: loops.clone(), deltas, smooth };
                out.add_term(key, coeff * QI::from_int(sign));
            }
        }
    }
    Ok(out)
}

/// All index vectors `v` with `v[k] < sizes[k]`.
fn odometer(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes
        .iter()
        .fold(vec![Vec::new()], |acc, &n| acc.into_iter().flat_map(|v| (0..n).map(move |k| [v.clone(), vec![k]].concat())).collect())
}

#[derive(Serialize, Deserialize)]
struct ExactJson {
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coefficient: ExactJson,
    kappa_power: u32,
    p_power: u32,
    loops: Vec<usize>,
    delta_factors: Vec<(usize, usize, u32)>,
    smooth_factor: SmoothFactor,
}

#[derive(Serialize, Deserialize)]
struct ExpressionJson {
    algebra: Algebra,
    orientation: FockOrientation,
    terms: Vec<TermJson>,
}

impl From<&DistributionalExpression> for ExpressionJson {
    fn from(e: &DistributionalExpression) -> Self {
        let terms = e
            .terms
            .iter()
            .map(|(k, c)| TermJson {
                coefficient: ExactJson { re: c.re.to_string(), im: c.im.to_string() },
                kappa_power: k.kappa,
                p_power: k.p,
                loops: k.loops.clone(),
                delta_factors: k.deltas.iter().map(|d| (d.left, d.right, d.order)).collect(),
                smooth_factor: k.smooth.clone(),
            })
            .collect();
        Self { algebra: e.algebra, orientation: e.orientation, terms }
    }
}

impl TryFrom<ExpressionJson> for DistributionalExpression {
    type Error = Error;

    fn try_from(j: ExpressionJson) -> Result<Self> {
        let parse = |s: &str| BigRational::from_str(s).map_err(|e| invalid("coefficient", e.to_string()));
        let mut out = Self::zero(j.algebra, j.orientation);
        for t in j.terms {
            let key = TermKey {
                kappa: t.kappa_power,
                p: t.p_power,
                loops: t.loops,
                deltas: t.delta_factors.into_iter().map(|(left, right, order)| DeltaFactor { left, right, order }).collect(),
                smooth: t.smooth_factor,
            };
            out.add_term(key, QI::new(parse(&t.coefficient.re)?, parse(&t.coefficient.im)?));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CurrentKind::*;

    fn orient() -> FockOrientation {
        FockOrientation::Reflected
    }

    #[test]
    fn drop_loops_matches_zero_weights_and_removes_the_pictured_loop() {
        let ins = Insertion::sequence(&[JPlus, JMinus]);
        let dropped = renormalize(&ins, &LoopScheme::DropLoops, orient()).unwrap();
        let zero = LoopScheme::LoopWeights([(2, BigRational::zero())].into());
        assert_eq!(renormalize(&ins, &zero, orient()).unwrap(), dropped);
        assert!(dropped.iter().all(|(k, _)| k.loops.is_empty()));
        assert!(matches!(renormalize(&ins, &LoopScheme::LoopWeights(BTreeMap::new()), orient()), Err(Error::MissingLoopWeight(2))));
    }

    #[test]
    fn loop_weight_enters_linearly_with_a_delta() {
        let ins = Insertion::sequence(&[JPlus, JMinus]);
        let dropped = renormalize(&ins, &LoopScheme::DropLoops, orient()).unwrap();
        let with = |mu: i64| {
            let s = LoopScheme::LoopWeights([(2, BigRational::from_integer(mu.into()))].into());
            renormalize(&ins, &s, orient()).unwrap().sub(&dropped)
        };
        let (one, two) = (with(1), with(2));
        assert_eq!(two, one.scale(&QI::from_int(2)));
        assert_eq!(one.len(), 1);
        let (key, _) = one.iter().next().unwrap();
        assert_eq!(key.loops, vec![2]);
        assert_eq!(key.deltas, vec![DeltaFactor { left: 0, right: 1, order: 0 }]);
    }

    #[test]
    fn json_round_trip() {
        let e = renormalize(&Insertion::sequence(&[J3, JPlus, JMinus]), &LoopScheme::unit_weights(3), orient()).unwrap();
        assert_eq!(DistributionalExpression::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn cutoff_delta_and_pairing_sums() {
        let p = CutoffParams { xi0: 0.0, xi: vec![0.25], kappa: 1.0, p: 0.0, cutoff: 4 };
        assert!((p.delta(0, 0.0) - Complex64::new(9.0, 0.0)).norm() < 1e-12);
        assert!(p.delta(1, 0.0).norm() < 1e-12);
        let g = p.pairing(FockOrientation::Standard, 0.3, 1.1);
        let h = p.pairing(FockOrientation::Reflected, 1.1, 0.3);
        assert!((g - h).norm() < 1e-12);
    }
}
