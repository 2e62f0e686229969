//! Composite currents as operator words on the mode realization, for correlators computed by
//! normal ordering without diagrams.

use num_traits::One;

use super::currents::CurrentKind;
use crate::error::{invalid, Result};
use crate::exact::{ExpSum, Field, QI};
use crate::gauss_field::{vacuum_expectation, BasisMonomial, ExactFock, ModeSpace, Op};

fn exponential(space: &ModeSpace, charge: i8, z: &QI) -> BasisMonomial {
    BasisMonomial::exponential(space.exponential_at(charge, z))
}

/// `∂_u exp^σ(z) = (s ∂_u x(z)) exp^σ(z)` with `s = σ` (`A`) or `iσ` (`K`).
fn differentiated_exponential(space: &ModeSpace, charge: i8, z: &QI) -> BasisMonomial {
    let exponent = space.exponential_at(charge, z);
    let s = exponent.coeff(0);
    let mut m = BasisMonomial::linear(space.field_derivative_at(z).scale(&s));
    m.exponent = exponent;
    m
}

/// The words `(coefficient, operators)` whose sum is the regularized current at `z`.
pub fn current_words(space: &ModeSpace, kind: CurrentKind, z: &QI, kappa: &QI) -> Result<Vec<(QI, Vec<Op>)>> {
    if kind.algebra() != space.algebra {
        return Err(invalid("current", "mode space belongs to the other algebra"));
    }
    let i = QI::i();
    let half_i = QI::from_ratio(1, 2) * i.clone();
    let words = match kind {
        CurrentKind::JPlus | CurrentKind::JMinus | CurrentKind::E | CurrentKind::F => {
            let charge: i8 = if matches!(kind, CurrentKind::JPlus | CurrentKind::E) { 1 } else { -1 };
            let sign = QI::from_int(charge as i64);
            let (outer, derivative, rho) = match kind {
                CurrentKind::JPlus | CurrentKind::JMinus => (half_i, sign.clone() * kappa.clone(), sign),
                _ => (half_i * sign, i.clone() * kappa.clone(), i),
            };
            let e = exponential(space, charge, z);
            vec![
                (outer.clone(), vec![Op::Create(z.clone()), Op::Mult(e.clone())]),
                (outer, vec![Op::Mult(e.clone()), Op::Annihilate(z.clone())]),
                (derivative, vec![Op::Mult(differentiated_exponential(space, charge, z))]),
                (rho, vec![Op::Rho(z.clone()), Op::Mult(e)]),
            ]
        }
        CurrentKind::J3 | CurrentKind::H => {
            let (bare, cartan) = if kind == CurrentKind::J3 {
                (i.clone(), QI::from_int(-2) * kappa.clone())
            } else {
                (-i.clone(), QI::from_int(2) * i * kappa.clone())
            };
            let pair = exponential(space, -1, z).product(&differentiated_exponential(space, 1, z));
            vec![(bare.clone(), vec![Op::Annihilate(z.clone())]), (bare, vec![Op::Create(z.clone())]), (cartan, vec![Op::Mult(pair)])]
        }
    };
    Ok(words)
}

/// `⟨v₀ ⊗ vac_p, φ₁(z₁)…φ_n(z_n) v₀ ⊗ vac_p⟩` by expanding every current into words and
/// normal ordering each product.
pub fn correlator_direct(space: &ModeSpace, fock: &ExactFock, kinds: &[CurrentKind], points: &[QI]) -> Result<ExpSum> {
    if kinds.len() != points.len() {
        return Err(crate::Error::GridMismatch { expected: kinds.len(), found: points.len() });
    }
    let expansions: Vec<Vec<(QI, Vec<Op>)>> =
        kinds.iter().zip(points).map(|(&k, z)| current_words(space, k, z, &fock.kappa)).collect::<Result<_>>()?;
    let mut products: Vec<(QI, Vec<Op>)> = vec![(QI::one(), Vec::new())];
    for words in &expansions {
        products = products
            .iter()
            .flat_map(|(c, w)| {
                words.iter().map(move |(c2, w2)| {
                    let mut word = w.clone();
                    word.extend(w2.iter().cloned());
                    (c.clone() * c2.clone(), word)
                })
            })
            .collect();
    }
    let mut total = ExpSum::zero();
    for (c, word) in products {
        total.add(&vacuum_expectation(space, fock, &word)?.scale(&c));
    }
    Ok(total)
}
