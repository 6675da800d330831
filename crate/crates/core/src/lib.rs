//! Weighted double Hurwitz numbers, computed by symmetric-group enumeration
//! and by topological recursion on a rational spectral curve, with the
//! integrable-systems objects in between as exact truncated series.

pub mod algebra;
pub mod curve;
pub mod error;
pub mod hurwitz;
pub mod operators;
pub mod symfun;
pub mod tau;
pub mod toprec;
pub mod verify;

pub use error::{Error, Result};
