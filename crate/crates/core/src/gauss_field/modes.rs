//! Exact mode-level realization of the current algebras on polynomial–exponential monomials.
//!
//! Modes `x_m`, `0 < |m| ≤ N`, with `x_{−m} = conj(x_m)` and `E[x_m x_{−m}] = ξ_m`; mode `0` is
//! `x₀` (algebra `A`, variance `2ξ₀`) or the uniform angle `φ` (algebra `K`). A regularized
//! field at `z = re^{iu}` is `x(z) = x₀ + Σ_{n>0} (x_n z̄ⁿ + x_{−n} zⁿ)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Algebra;
use crate::error::{invalid, Error, Result};
use crate::exact::{ExpSum, Field, QI};

type Key = Vec<(i32, (BigRational, BigRational))>;

/// `Σ_m c_m x_m` over mode indices `−N ≤ m ≤ N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearForm {
    coeffs: BTreeMap<i32, QI>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn mode(m: i32) -> Self {
        let mut l = Self::zero();
        l.coeffs.insert(m, QI::one());
        l
    }

    pub fn coeff(&self, m: i32) -> QI {
        self.coeffs.get(&m).cloned().unwrap_or_else(QI::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn set(&mut self, m: i32, c: QI) {
        if c.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.coeffs {
            out.set(m, out.coeff(m) + c.clone());
        }
        out
    }

    pub fn scale(&self, s: &QI) -> Self {
        let mut out = Self::zero();
        for (&m, c) in &self.coeffs {
            out.set(m, c.clone() * s.clone());
        }
        out
    }

    pub fn modes(&self) -> impl Iterator<Item = (i32, &QI)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    fn key(&self) -> Key {
        self.coeffs.iter().map(|(&m, c)| (m, (c.re.clone(), c.im.clone()))).collect()
    }
}

/// `coeff · Π_k L_k · exp(Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMonomial {
    pub coeff: QI,
    pub factors: Vec<LinearForm>,
    pub exponent: LinearForm,
}

impl BasisMonomial {
    pub fn constant(c: QI) -> Self {
        Self { coeff: c, factors: Vec::new(), exponent: LinearForm::zero() }
    }

    pub fn one() -> Self {
        Self::constant(QI::one())
    }

    pub fn linear(l: LinearForm) -> Self {
        Self { coeff: QI::one(), factors: vec![l], exponent: LinearForm::zero() }
    }

    pub fn exponential(y: LinearForm) -> Self {
        Self { coeff: QI::one(), factors: Vec::new(), exponent: y }
    }

    pub fn scaled(mut self, s: &QI) -> Self {
        self.coeff *= s.clone();
        self
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Self { coeff: self.coeff.clone() * other.coeff.clone(), factors, exponent: self.exponent.add(&other.exponent) }
    }

    /// `∂/∂x_m` by the Leibniz rule.
    fn partial(&self, m: i32) -> Vec<Self> {
        let mut out = Vec::new();
        for (k, l) in self.factors.iter().enumerate() {
            let c = l.coeff(m);
            if c.is_zero() {
                continue;
            }
            let mut factors = self.factors.clone();
            factors.remove(k);
            out.push(Self { coeff: self.coeff.clone() * c, factors, exponent: self.exponent.clone() });
        }
        let c = self.exponent.coeff(m);
        if !c.is_zero() {
            out.push(self.clone().scaled(&c));
        }
        out
    }

    fn key(&self) -> (Vec<Key>, Key) {
        let mut factors: Vec<Key> = self.factors.iter().map(LinearForm::key).collect();
        factors.sort();
        (factors, self.exponent.key())
    }
}

/// Merges monomials with equal factor multisets and exponents, dropping zeros.
pub fn collect(monomials: Vec<BasisMonomial>) -> Vec<BasisMonomial> {
    let mut merged: BTreeMap<(Vec<Key>, Key), BasisMonomial> = BTreeMap::new();
    for m in monomials {
        if m.coeff.is_zero() {
            continue;
        }
        match merged.entry(m.key()) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let c = e.get().coeff.clone() + m.coeff;
                e.get_mut().coeff = c;
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(m);
            }
        }
    }
    merged.into_values().filter(|m| !m.coeff.is_zero()).collect()
}

/// Orientation of the Fock two-point pairing `⟨ρ(z_l)ρ(z_r)⟩` for `l` left of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FockOrientation {
    /// `Σ 2κn (z̄_l z_r)ⁿ`, from `ρ(u) = Σ ρ_n e^{−inu}`.
    Standard,
    /// `Σ 2κn (z_l z̄_r)ⁿ`, from `ρ(u) = Σ ρ_n e^{inu}`.
    Reflected,
}

impl FockOrientation {
    /// The oriented product whose powers build the two-point function.
    pub fn pairing<F: Field>(self, zl: &F, zr: &F) -> F {
        match self {
            Self::Standard => zl.conj() * zr.clone(),
            Self::Reflected => zl.clone() * zr.conj(),
        }
    }
}

/// Truncated mode space with rational weights `ξ_n > 0` for every `1 ≤ n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpace {
    pub algebra: Algebra,
    pub xi0: BigRational,
    /// `xi[n − 1] = ξ_n`; the cutoff is `xi.len()`.
    pub xi: Vec<BigRational>,
}

impl ModeSpace {
    pub fn new(algebra: Algebra, xi0: Option<BigRational>, xi: Vec<BigRational>) -> Result<Self> {
        let positive = |x: &BigRational| *x > BigRational::zero();
        if xi.is_empty() || !xi.iter().all(positive) {
            return Err(invalid("xi", "every mode up to the cutoff needs a positive weight"));
        }
        let xi0 = match (algebra, xi0) {
            (Algebra::A, Some(x)) if positive(&x) => x,
            (Algebra::K, None) => BigRational::zero(),
            _ => return Err(invalid("xi0", "positive for algebra A, absent for K")),
        };
        Ok(Self { algebra, xi0, xi })
    }

    pub fn cutoff(&self) -> usize {
        self.xi.len()
    }

    fn weight(&self, m: i32) -> QI {
        let n = m.unsigned_abs() as usize;
        let x = if n == 0 { self.xi0.clone() } else { self.xi[n - 1].clone() };
        QI::new(x, BigRational::zero())
    }

    fn check_mode(&self, m: i32) -> Result<()> {
        let needed = m.unsigned_abs() as usize;
        if needed > self.cutoff() {
            return Err(Error::CutoffExceeded { needed, cutoff: self.cutoff() });
        }
        Ok(())
    }

    fn all_modes(&self) -> impl Iterator<Item = i32> {
        let n = self.cutoff() as i32;
        -n..=n
    }

    /// `E[L₁ L₂]`; the `K` angle has no Gaussian part.
    pub fn covariance(&self, l1: &LinearForm, l2: &LinearForm) -> QI {
        let mut acc = QI::zero();
        for (m, c) in l1.modes() {
            if m == 0 {
                if self.algebra == Algebra::A {
                    acc += c.clone() * l2.coeff(0) * self.weight(0) * QI::from_int(2);
                }
                continue;
            }
            acc += c.clone() * l2.coeff(-m) * self.weight(m);
        }
        acc
    }

    /// Regularized field `x(z)` (or `x^c(z)` with `φ` as mode 0).
    pub fn field_at(&self, z: &QI) -> LinearForm {
        let mut l = LinearForm::mode(0);
        for n in 1..=self.cutoff() as u32 {
            l.set(n as i32, z.conj().powu(n));
            l.set(-(n as i32), z.powu(n));
        }
        l
    }

    /// `∂_u x(z)` for `z = re^{iu}`.
    pub fn field_derivative_at(&self, z: &QI) -> LinearForm {
        let mut l = LinearForm::zero();
        for n in 1..=self.cutoff() as u32 {
            let k = QI::from_int(n as i64) * QI::i();
            l.set(n as i32, -k.clone() * z.conj().powu(n));
            l.set(-(n as i32), k * z.powu(n));
        }
        l
    }

    /// Exponent of `e^{σx(z)}` (algebra `A`) or `e^{iσx^c(z)}` (algebra `K`).
    pub fn exponential_at(&self, charge: i8, z: &QI) -> LinearForm {
        let s = QI::from_int(charge as i64);
        let s = match self.algebra {
            Algebra::A => s,
            Algebra::K => s * QI::i(),
        };
        self.field_at(z).scale(&s)
    }

    /// Weights `w_m` with `a(z) = i Σ_m w_m ∂/∂x_m`: `zᵐ` for `m > 0`, `z̄^{|m|}` for `m < 0`, `1` at `0`.
    fn current_weights(&self, z: &QI) -> Vec<(i32, QI)> {
        self.all_modes()
            .map(|m| {
                let w = match m {
                    0 => QI::one(),
                    m if m > 0 => z.powu(m as u32),
                    m => z.conj().powu(m.unsigned_abs()),
                };
                (m, w)
            })
            .collect()
    }

    /// Gaussian (and uniform-angle) expectation of one monomial.
    pub fn expectation(&self, m: &BasisMonomial) -> Result<ExpSum> {
        if self.algebra == Algebra::K {
            if !m.exponent.coeff(0).is_zero() {
                return Ok(ExpSum::zero());
            }
            if m.factors.iter().any(|l| !l.coeff(0).is_zero()) {
                return Err(invalid("monomial", "the compact angle enters only through exponentials"));
            }
        }
        let y = &m.exponent;
        let q = self.covariance(y, y) * QI::from_ratio(1, 2);
        let means: Vec<QI> = m.factors.iter().map(|l| self.covariance(l, y)).collect();
        let idx: Vec<usize> = (0..m.factors.len()).collect();
        let wick = self.shifted_wick(&m.factors, &means, &idx);
        Ok(ExpSum::term(m.coeff.clone() * wick, q))
    }

    /// `E[Π_{k ∈ idx} (μ_k + L̃_k)]` for centred Gaussian `L̃`.
    fn shifted_wick(&self, factors: &[LinearForm], means: &[QI], idx: &[usize]) -> QI {
        let Some((&first, rest)) = idx.split_first() else {
            return QI::one();
        };
        let mut total = means[first].clone() * self.shifted_wick(factors, means, rest);
        for (pos, &j) in rest.iter().enumerate() {
            let cov = self.covariance(&factors[first], &factors[j]);
            if cov.is_zero() {
                continue;
            }
            let mut remaining = rest.to_vec();
            remaining.remove(pos);
            total += cov * self.shifted_wick(factors, means, &remaining);
        }
        total
    }
}

/// Generators acting on monomials.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `a_n = i∂/∂x_{−n}`.
    Annihilation(i32),
    /// `b_n = i(∂/∂x_{−n} − ξ_n⁻¹x_n)`, the adjoint of `a_{−n}`.
    Creation(i32),
    /// `h_n = ½(a_n + b_n)`.
    Cartan(i32),
    /// Regularized current `a(z) = Σ_{n≥0} a_n z̄ⁿ + Σ_{n>0} a_{−n} zⁿ`.
    AnnihilationCurrent(QI),
    CreationCurrent(QI),
    CartanCurrent(QI),
    /// Multiplication by `e^{±x(z)}` or `α^{±}(z)`.
    Exp {
        charge: i8,
        at: QI,
    },
}

fn annihilation_mode(_space: &ModeSpace, n: i32, m: &BasisMonomial) -> Vec<BasisMonomial> {
    m.partial(-n).into_iter().map(|t| t.scaled(&QI::i())).collect()
}

fn creation_mode(space: &ModeSpace, n: i32, m: &BasisMonomial) -> Vec<BasisMonomial> {
    let mut out = annihilation_mode(space, n, m);
    let mult_weight = match (space.algebra, n) {
        (Algebra::K, 0) => None,
        (Algebra::A, 0) => Some(space.weight(0) * QI::from_int(2)),
        _ => Some(space.weight(n)),
    };
    if let Some(w) = mult_weight {
        let factor = BasisMonomial::linear(LinearForm::mode(n)).scaled(&(-QI::i() / w));
        out.push(m.product(&factor));
    }
    out
}

/// Symbolic action of `gen` on `m`.
pub fn apply_generator(space: &ModeSpace, gen: &Generator, m: &BasisMonomial) -> Result<Vec<BasisMonomial>> {
    let half = QI::from_ratio(1, 2);
    let out = match gen {
        Generator::Annihilation(n) => {
            space.check_mode(*n)?;
            annihilation_mode(space, *n, m)
        }
        Generator::Creation(n) => {
            space.check_mode(*n)?;
            creation_mode(space, *n, m)
        }
        Generator::Cartan(n) => {
            space.check_mode(*n)?;
            let mut terms = annihilation_mode(space, *n, m);
            terms.extend(creation_mode(space, *n, m));
            terms.into_iter().map(|t| t.scaled(&half)).collect()
        }
        Generator::AnnihilationCurrent(z) | Generator::CreationCurrent(z) | Generator::CartanCurrent(z) => {
            let mut terms = Vec::new();
            for (mode, w) in space.current_weights(z) {
                // The weight multiplies the operator that differentiates along x_mode, i.e. index −mode.
                let n = -mode;
                let part = match gen {
                    Generator::AnnihilationCurrent(_) => annihilation_mode(space, n, m),
                    Generator::CreationCurrent(_) => creation_mode(space, n, m),
                    _ => {
                        let mut t = annihilation_mode(space, n, m);
                        t.extend(creation_mode(space, n, m));
                        t.into_iter().map(|t| t.scaled(&half)).collect()
                    }
                };
                terms.extend(part.into_iter().map(|t| t.scaled(&w)));
            }
            terms
        }
        Generator::Exp { charge, at } => vec![m.product(&BasisMonomial::exponential(space.exponential_at(*charge, at)))],
    };
    Ok(collect(out))
}

/// `[X, M_f]` for a first-order generator `X`: multiplication by `X(f) − f·X(1)`.
pub fn commutator_with_multiplication(space: &ModeSpace, gen: &Generator, f: &BasisMonomial) -> Result<Vec<BasisMonomial>> {
    let mut terms = apply_generator(space, gen, f)?;
    for t in apply_generator(space, gen, &BasisMonomial::one())? {
        terms.push(f.product(&t).scaled(&-QI::one()));
    }
    Ok(collect(terms))
}

/// Heisenberg–Fock parameters in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactFock {
    pub kappa: QI,
    pub p: QI,
    pub orientation: FockOrientation,
}

impl ExactFock {
    /// `Σ_{n=1}^{N} 2κn (pairing)ⁿ` (the `p²` part enters through unpaired insertions).
    fn contraction(&self, zl: &QI, zr: &QI, cutoff: usize) -> QI {
        let w = self.orientation.pairing(zl, zr);
        (1..=cutoff as u32).fold(QI::zero(), |acc, n| acc + QI::from_int(2 * n as i64) * self.kappa.clone() * w.powu(n))
    }

    /// `⟨vac_p, ρ(z₁)…ρ(z_k) vac_p⟩` by moving annihilation parts right.
    pub fn correlator(&self, points: &[QI], cutoff: usize) -> QI {
        let Some((first, rest)) = points.split_first() else {
            return QI::one();
        };
        let mut total = self.p.clone() * self.correlator(rest, cutoff);
        for j in 0..rest.len() {
            let mut remaining = rest.to_vec();
            let zj = remaining.remove(j);
            total += self.contraction(first, &zj, cutoff) * self.correlator(&remaining, cutoff);
        }
        total
    }
}

/// One factor in an operator word.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Mult(BasisMonomial),
    /// `a(z)`.
    Annihilate(QI),
    /// `b(z)`.
    Create(QI),
    /// Heisenberg current `ρ(z)`.
    Rho(QI),
}

/// `⟨v₀ ⊗ vac_p, W v₀ ⊗ vac_p⟩` in the module where `a` and `b` commute: annihilation
/// operators are moved right and creation operators left through the multiplication
/// operators, and terms reaching the vacuum are discarded.
pub fn vacuum_expectation(space: &ModeSpace, fock: &ExactFock, word: &[Op]) -> Result<ExpSum> {
    if let Some(i) = word.iter().rposition(|op| matches!(op, Op::Annihilate(_))) {
        let Op::Annihilate(z) = &word[i] else { unreachable!() };
        let gen = Generator::AnnihilationCurrent(z.clone());
        let mut total = ExpSum::zero();
        for j in i + 1..word.len() {
            if let Op::Mult(f) = &word[j] {
                for g in commutator_with_multiplication(space, &gen, f)? {
                    let mut next = word.to_vec();
                    next[j] = Op::Mult(g);
                    next.remove(i);
                    total.add(&vacuum_expectation(space, fock, &next)?);
                }
            }
        }
        return Ok(total);
    }
    if let Some(i) = word.iter().position(|op| matches!(op, Op::Create(_))) {
        let Op::Create(z) = &word[i] else { unreachable!() };
        let gen = Generator::CreationCurrent(z.clone());
        let mut total = ExpSum::zero();
        for j in 0..i {
            if let Op::Mult(f) = &word[j] {
                // M_f b = b M_f − [b, M_f], and ⟨v₀| b = 0.
                for g in commutator_with_multiplication(space, &gen, f)? {
                    let mut next = word.to_vec();
                    next[j] = Op::Mult(g.scaled(&-QI::one()));
                    next.remove(i);
                    total.add(&vacuum_expectation(space, fock, &next)?);
                }
            }
        }
        return Ok(total);
    }
    let mut product = BasisMonomial::one();
    let mut rhos = Vec::new();
    for op in word {
        match op {
            Op::Mult(f) => product = product.product(f),
            Op::Rho(z) => rhos.push(z.clone()),
            _ => unreachable!(),
        }
    }
    let fock_value = fock.correlator(&rhos, space.cutoff());
    Ok(space.expectation(&product)?.scale(&fock_value))
}
