//! Executable finite-dimensional models of differential-algebraic
//! constructions on involutive algebras: truncated power series over
//! coefficient algebras, systems of partial derivatives, differential
//! operators defined by commutators, jets, tangent and cotangent spaces,
//! a checker for smooth-envelope conditions, and finite spectral theory.

pub mod algebra;
pub mod cli;
pub mod dersys;
pub mod diffcalc;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jets;
pub mod linalg;
pub mod multiindex;
pub mod poly;
pub mod report;
pub mod selftest;
pub mod series;
pub mod spectra;

pub use error::{Error, Result};
