//! Exact-arithmetic lattice machinery: integer quadratic forms, glue groups
//! and discriminant forms, twists of principal lattices, isometry search,
//! a positivity criterion for hyperbolic isometries of spectral radius > 1,
//! and the Enriques-quadruple verifier built on top of all of it.
//!
//! Everything is exact: arbitrary-precision integers and rationals throughout,
//! Sturm sequences for real-algebraic sign decisions. Floating point never
//! decides anything.

pub mod budget;
pub mod enriques;
pub mod exactalg;
pub mod isomgroup;
pub mod lattice;
pub mod positivity;
pub mod twistglue;

pub use budget::{Budget, BudgetError};
