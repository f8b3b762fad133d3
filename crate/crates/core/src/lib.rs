//! Elliptic zeta functions on `ℤ + τℤ`, weight-2 modular forms and
//! equivariant functions, and the correspondences between them.
//!
//! Numerics are q-series based with reduction to the fundamental domain;
//! the recurrence coefficients of `∫℘ⁿ` are computed in exact rational
//! arithmetic.

pub mod cli;
pub mod correspondence;
pub mod eisenstein;
pub mod gamma;
pub mod lattice;
pub mod oracle;
pub mod quadrature;
pub mod suite;
pub mod weierstrass;
pub mod zeta_algebra;

pub use lattice::{Extended, Lattice, ModularPoint, Unimodular, C64};
pub use weierstrass::EvalConfig;
