//! Normal-ordering diagrams for correlators of the composite `ŝl(2, ℝ)` currents: enumeration,
//! loop classification, regularized evaluation, renormalization on the circle, and the
//! commutator and Hermiticity checks.

pub mod commutator;
pub mod currents;
pub mod direct;
pub mod enumerate;
pub mod evaluate;
pub mod expression;

pub use commutator::{
    check_relation, commutator_correlator, conjugate_mismatch, flipped_relation, hermiticity_check, max_fourier, relation, relation_rhs,
    FourierCheck, HermiticityReport, Relation, RelationCheck,
};
pub use currents::{expand_current, CurrentKind, Operator, Slot, TermShape, VertexTerm};
pub use direct::{correlator_direct, current_words};
pub use enumerate::{
    classify, cycles, enumerate_diagrams, enumerate_diagrams_bounded, Cycle, Diagram, Edge, Topology, DEFAULT_INSERTION_BOUND,
};
pub use evaluate::{correlator_exact, correlator_regularized, diagram_parts, evaluate_regularized, DeltaMode, FieldParams};
pub use expression::{
    renormalize, CutoffParams, DeltaFactor, DistributionalExpression, Insertion, LoopScheme, SlotRef, SmoothFactor, TermKey,
};
