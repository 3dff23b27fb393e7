#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dilation;
pub mod error;
pub mod funcalc;
pub mod holo;
pub mod json;
pub mod operator;
pub mod quadrature;
pub mod regions;
pub mod rng;
pub mod semigroup;

pub use error::{Error, Result};
pub use holo::{FunctionSpec, HoloFunction, Rational};
pub use operator::ComplexMatrix;
pub use regions::{Contour, Region};
