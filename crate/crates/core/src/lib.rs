//! Design-by-Morphing for two-dimensional airfoils.
//!
//! Baseline sections are collocated onto a shared x-grid and morphed by
//! normalized weighted sums; the resulting design space can be searched for
//! shape reconstruction or bi-objective aerodynamic optimization.

// `!(x > 0.0)` is used on purpose: it rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aero;
pub mod analysis;
pub mod error;
pub mod evo;
pub mod geometry;
pub mod morph;
pub mod param;

pub use error::{Error, Result};
