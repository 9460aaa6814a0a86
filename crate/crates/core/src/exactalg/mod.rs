//! Arbitrary-precision integer/rational linear algebra, univariate polynomial
//! arithmetic, and real-algebraic sign determination.

pub mod matrix;
pub mod mod2;
pub mod numfield;
pub mod poly;
pub mod realalg;
pub mod sturm;

pub use matrix::{IMat, QMat, SmithForm};
pub use mod2::F2Poly;
pub use numfield::{NfElem, NumberField};
pub use poly::IntPoly;
pub use realalg::RealAlgebraic;

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Errors from the exact-arithmetic layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ExactError {
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not reciprocal of even degree")]
    NotReciprocal,
    #[error("polynomial is reducible over the rationals")]
    Reducible,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix has non-integer entries")]
    NotIntegral,
    #[error("matrix is singular")]
    Singular,
    #[error("argument out of range: {0}")]
    Domain(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}
