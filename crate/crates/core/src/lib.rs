//! Distributed-order subordinators built by Lévy mixing of parametrized
//! Bernstein families.
//!
//! A [`Family`] gives a Lévy triplet `(a(y), b(y), ν(ds, y))` for each parameter
//! `y`; a [`MixingMeasure`] randomizes `y`. [`MixedExponent`] carries the pair and
//! evaluates the mixed Laplace exponent `E f(λ, Y)` and the kernel `E ν̄(s, Y)`.
//! The remaining modules simulate the subordinator and its inverse, invert the
//! Laplace transforms, discretize the distributed-order operators and compute
//! the delayed-Brownian-motion diffusion quantities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod conjugate;
pub mod diffusion;
pub mod error;
pub mod export;
pub mod family;
pub mod measure;
pub mod mixing;
pub mod operators;
pub mod quad;
pub mod sampler;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
pub use family::{Family, ParamMap};
pub use measure::{MeasureSpec, MixingMeasure};
pub use mixing::{AssumptionReport, MixedExponent};

/// Version string stamped into JSON artifacts.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
