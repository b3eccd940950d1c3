//! Lower-tail numerics for the KPZ one-point distribution at finite
//! temperature: the deformed Airy Fredholm determinant Q(s,T), its
//! equilibrium-measure quantities, and the closed-form tail asymptotics.

// Reference constants keep their full printed digits; `!(x > 0.0)` is used on purpose so NaN fails checks.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod asymptotics;
pub mod cli;
pub mod equilibrium;
pub mod fredholm;
pub mod kernels;
