//! Verification suite for sharp weighted functional inequalities attached to
//! a root system: each named check computes both sides of an inequality or
//! identity with controlled quadrature error and reports machine-readable
//! margins.

pub mod checks;
pub mod config;
pub mod report;
pub mod suite;
pub mod testfn;
