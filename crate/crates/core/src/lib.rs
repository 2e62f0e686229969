//! Verification engine for Wiener-measure representations of the loop ax+b group,
//! loop Γ-functionals, Gaussian current correlators and the diagrammatic
//! renormalization of affine sl(2,ℝ) correlators.

// `!(x > 0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axb_group;
pub mod diagram_engine;
pub mod error;
pub mod exact;
pub mod gamma_suite;
pub mod gauss_field;
pub mod mc;
pub mod quad;
pub mod scalar;
pub mod smooth;
pub mod wiener;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type Path = wiener::Path<f64>;
pub type McEstimate = mc::McEstimate<f64>;
pub type TrigPoly = smooth::TrigPoly<f64>;
