//! The ax+b group, its loop and centrally extended loop groups, their representations on
//! Wiener-measure function spaces and the associated Lie-algebra generators.

pub mod finite;
pub mod lie;
pub mod loop_group;
pub mod rep;

pub use finite::{
    act_r_lambda, gamma_kernel_apply, gamma_kernel_extrapolated, inverse_laplace, laplace, mul_g, GroupElementG, InverseContour,
    KernelValue, LaplaceImage, SampledFn,
};
pub use lie::{lie_generator_d, lie_generator_t, ModePoly, ModePolynomialOperator};
pub use loop_group::{AlphaFn, BFn, LoopElement, LoopGroup, Subgroup};
pub use rep::{act_rho, unitarity_check, Acted, ExpFunctional, LoopFunctional, Regime, RepParams, ShiftedPath, UnitarityReport};
