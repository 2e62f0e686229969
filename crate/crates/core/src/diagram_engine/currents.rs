//! Composite currents and their vertex terms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};
use crate::exact::{Field, QI};
use crate::gauss_field::{Algebra, FockOrientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurrentKind {
    JPlus,
    JMinus,
    J3,
    E,
    F,
    H,
}

impl CurrentKind {
    pub const J_FAMILY: [CurrentKind; 3] = [CurrentKind::JPlus, CurrentKind::JMinus, CurrentKind::J3];
    pub const EFH_FAMILY: [CurrentKind; 3] = [CurrentKind::E, CurrentKind::F, CurrentKind::H];

    /// `J`-currents are built on the `K` algebra, `E, F, H` on `A`.
    pub fn algebra(self) -> Algebra {
        match self {
            Self::JPlus | Self::JMinus | Self::J3 => Algebra::K,
            Self::E | Self::F | Self::H => Algebra::A,
        }
    }

    /// `X̃` with `X(z)* = −X̃(z)`.
    pub fn adjoint_partner(self) -> Self {
        match self {
            Self::JPlus => Self::JMinus,
            Self::JMinus => Self::JPlus,
            other => other,
        }
    }

    /// Orientation of the Heisenberg two-point pairing under which the family closes.
    pub fn fock_orientation(self) -> FockOrientation {
        match self.algebra() {
            Algebra::K => FockOrientation::Reflected,
            Algebra::A => FockOrientation::Standard,
        }
    }

    pub fn family(self) -> [CurrentKind; 3] {
        match self.algebra() {
            Algebra::K => Self::J_FAMILY,
            Algebra::A => Self::EFH_FAMILY,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::JPlus => "J+",
            Self::JMinus => "J-",
            Self::J3 => "J3",
            Self::E => "E",
            Self::F => "F",
            Self::H => "H",
        }
    }
}

impl fmt::Display for CurrentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurrentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "J+" | "Jp" | "JPlus" => Self::JPlus,
            "J-" | "Jm" | "JMinus" => Self::JMinus,
            "J3" => Self::J3,
            "E" => Self::E,
            "F" => Self::F,
            "H" => Self::H,
            _ => return Err(invalid("current", format!("unknown current `{s}`"))),
        })
    }
}

/// Creation/annihilation part of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    /// `a(z)`, contracts with an exponential to its right.
    Annihilation,
    /// `b(z)`, contracts with an exponential to its left.
    Creation,
}

impl Operator {
    /// Sign picked up when the operator is moved past a multiplication operator:
    /// `a M = M a + [a, M]` and `M b = b M − [b, M]`.
    pub fn sign(self) -> i64 {
        match self {
            Self::Annihilation => 1,
            Self::Creation => -1,
        }
    }

    /// Whether a source at `source` may contract with a target at `target`.
    pub fn reaches(self, source: usize, target: usize) -> bool {
        match self {
            Self::Annihilation => target > source,
            Self::Creation => target < source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermShape {
    /// `b·exp`
    CreationExp,
    /// `exp·a`
    ExpAnnihilation,
    /// `κ ∂_u exp`
    DerivativeExp,
    /// `ρ·exp`
    RhoExp,
    /// `a` or `b` alone (from the Cartan current).
    Bare(Operator),
    /// `exp⁻ ∂_u exp⁺`
    ExpDerivativeExp,
}

/// One exponential factor of a vertex; `derivative` marks an angle derivative acting on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub charge: i8,
    pub derivative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexTerm {
    pub shape: TermShape,
    /// Numeric part of the coefficient; the full coefficient is `coefficient · κ^{kappa_power}`.
    pub coefficient: QI,
    pub kappa_power: u32,
    pub slots: Vec<Slot>,
}

impl VertexTerm {
    pub fn source(&self) -> Option<Operator> {
        match self.shape {
            TermShape::CreationExp => Some(Operator::Creation),
            TermShape::ExpAnnihilation => Some(Operator::Annihilation),
            TermShape::Bare(op) => Some(op),
            _ => None,
        }
    }

    pub fn has_rho(&self) -> bool {
        self.shape == TermShape::RhoExp
    }

    pub fn charge(&self) -> i32 {
        self.slots.iter().map(|s| s.charge as i32).sum()
    }

    /// Can receive contraction lines.
    pub fn is_target(&self) -> bool {
        !self.slots.is_empty()
    }
}

fn term(shape: TermShape, coefficient: QI, kappa_power: u32, slots: Vec<Slot>) -> VertexTerm {
    VertexTerm { shape, coefficient, kappa_power, slots }
}

fn plain(charge: i8) -> Vec<Slot> {
    vec![Slot { charge, derivative: false }]
}

fn differentiated(charge: i8) -> Vec<Slot> {
    vec![Slot { charge, derivative: true }]
}

fn cartan_pair() -> Vec<Slot> {
    vec![Slot { charge: -1, derivative: false }, Slot { charge: 1, derivative: true }]
}

/// The term list of a composite current.
pub fn expand_current(kind: CurrentKind) -> Vec<VertexTerm> {
    let i = QI::i();
    let half_i = QI::from_ratio(1, 2) * i.clone();
    match kind {
        CurrentKind::JPlus | CurrentKind::JMinus => {
            let s: i8 = if kind == CurrentKind::JPlus { 1 } else { -1 };
            let sign = QI::from_int(s as i64);
            vec![
                term(TermShape::CreationExp, half_i.clone(), 0, plain(s)),
                term(TermShape::ExpAnnihilation, half_i, 0, plain(s)),
                term(TermShape::DerivativeExp, sign.clone(), 1, differentiated(s)),
                term(TermShape::RhoExp, sign, 0, plain(s)),
            ]
        }
        CurrentKind::J3 => vec![
            term(TermShape::Bare(Operator::Annihilation), i.clone(), 0, Vec::new()),
            term(TermShape::Bare(Operator::Creation), i, 0, Vec::new()),
            term(TermShape::ExpDerivativeExp, QI::from_int(-2), 1, cartan_pair()),
        ],
        CurrentKind::E | CurrentKind::F => {
            let s: i8 = if kind == CurrentKind::E { 1 } else { -1 };
            let outer = half_i * QI::from_int(s as i64);
            vec![
                term(TermShape::CreationExp, outer.clone(), 0, plain(s)),
                term(TermShape::ExpAnnihilation, outer, 0, plain(s)),
                term(TermShape::DerivativeExp, i.clone(), 1, differentiated(s)),
                term(TermShape::RhoExp, i, 0, plain(s)),
            ]
        }
        CurrentKind::H => vec![
            term(TermShape::Bare(Operator::Annihilation), -i.clone(), 0, Vec::new()),
            term(TermShape::Bare(Operator::Creation), -i.clone(), 0, Vec::new()),
            term(TermShape::ExpDerivativeExp, QI::from_int(2) * i, 1, cartan_pair()),
        ],
    }
}

/// Constant `c` in `[a, exp^σ] = [b, exp^σ] = c σ δ exp^σ`: `−1` for `α^±`, `i` for `e^±`.
pub fn contraction_constant<F: Field>(algebra: Algebra) -> F {
    match algebra {
        Algebra::K => -F::one(),
        Algebra::A => F::i(),
    }
}
