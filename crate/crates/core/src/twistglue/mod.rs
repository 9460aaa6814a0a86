//! Principal lattices attached to reciprocal polynomials, twists by elements
//! of the trace ring, feasibility constraints for Salem factors, and the
//! gluing engine for lattices with isometries.

pub mod constraints;
pub mod gluing;
pub mod principal;

pub use constraints::{
    coprime_order_glue_predicates, cyclic_factor_glue_shape, feasible_primes, salem_factor_check,
    CoprimeGlueReport, GlueShapeReport, SalemFactorReport,
};
pub use gluing::{
    enumerate_gluings, glue, GlueOptions, GluedResult, GluingMap, SubgroupSpec, TargetFilter,
};
pub use principal::{principal_lattice, twist, PrincipalLattice, TwistElement};

use crate::budget::BudgetError;
use crate::exactalg::ExactError;
use crate::isomgroup::IsomError;
use crate::lattice::LatticeError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum TwistGlueError {
    #[error("polynomial must be monic, irreducible, reciprocal, of even degree")]
    BadPolynomial,
    #[error("twist element must be nonzero")]
    ZeroTwist,
    #[error("twisted form is not integral")]
    TwistNotIntegral,
    #[error("characteristic polynomial mismatch")]
    CharPolyMismatch,
    #[error("salem polynomial degree exceeds 10")]
    DegreeTooLarge,
    #[error("subgroup specification invalid: {0}")]
    BadSubgroup(String),
    #[error("gluing enumeration for non-elementary subgroups needs explicit generators")]
    UnsupportedSubgroup,
    #[error("gluing map violates {0}")]
    InvalidGluing(String),
    #[error("isometries do not have coprime finite orders")]
    NotCoprime,
    #[error("resultant hypothesis fails at prime {0}")]
    ResultantHypothesis(u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Isom(#[from] IsomError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
}
