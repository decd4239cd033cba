//! Numerical certification of strong starlikeness.
//!
//! [`params`] solves the sector-angle chain and evaluates `φ(μ)`, [`series`]
//! holds truncated power series with the derived expressions, [`argsup`]
//! measures argument suprema on the disk and [`certify`] ties them together
//! into auditable certificates.

pub mod argsup;
pub mod certify;
pub mod params;
pub mod series;

pub use num_complex::Complex64;
