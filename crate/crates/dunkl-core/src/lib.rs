//! Dunkl differential-difference calculus on finite root systems.
//!
//! The crate provides the machinery needed to verify weighted functional
//! inequalities numerically:
//!
//! * [`root_system`]: finite root systems (types A, B, D, dihedral, sign
//!   flips, products), their reflection groups, orbits, chambers, and the
//!   associated homogeneous weight `w_k`.
//! * [`poly`]: multivariate polynomials with exact rational coefficients,
//!   including exact division by linear forms. This is what makes the
//!   difference quotients in Dunkl operators exact on polynomials.
//! * [`ops`]: the Dunkl operators `T_i`, gradient, and Laplacian, on both
//!   exact polynomials and numerically evaluated scalar fields, together
//!   with the product rule and its correction term.
//! * [`intertwine`]: the degree-preserving intertwining operator built by
//!   per-degree exact linear solves.
//! * [`kernel`]: the rank-1 Dunkl kernel as an ODE initial value problem,
//!   and [`transform`]: the rank-1 Dunkl transform with a Plancherel check.
//! * [`quadrature`]: weighted quadrature rules (boxes, balls, spheres,
//!   radial half-lines) with two-resolution error estimates.
//! * [`hharmonics`]: spherical h-harmonics as exact kernels of the Dunkl
//!   Laplacian, orthonormalized on the sphere.
//! * [`cms`]: the spectral-gap form of the rational Calogero-Moser-Sutherland
//!   operator, its conjugation back to the Dunkl Laplacian, and the exact
//!   cross-term cancellation it relies on.

pub mod cms;
pub mod field;
pub mod hharmonics;
pub mod intertwine;
pub mod kernel;
pub mod linalg;
pub mod ops;
pub mod poly;
pub mod quadrature;
pub mod root_system;
pub mod special;
pub mod transform;

pub use field::ScalarField;
pub use poly::MultiPoly;
pub use root_system::{DunklContext, Family, MultiplicityFunction, Root, RootSystem};

/// Numerical rational type used throughout the exact paths.
pub type Rational = num::BigRational;

/// Threshold below which a point counts as lying on a reflecting hyperplane.
pub const HYPERPLANE_TOL: f64 = 1e-7;

/// Tolerance for floating-point root set membership (dihedral closures).
pub const ROOT_MATCH_TOL: f64 = 1e-12;
