//! The principal lattice of a monic irreducible reciprocal polynomial, and
//! twists by elements of the trace ring Z[f + f^-1].

use super::TwistGlueError;
use crate::exactalg::poly::{is_irreducible, trace_polynomial, IntPoly, TracePoly};
use crate::exactalg::{numfield, IMat, Int, NumberField, Rat};
use crate::isomgroup::{check_isometry, Isometry};
use crate::lattice::Lattice;
use num_traits::{One, Signed, Zero};

/// The principal lattice of P: the module Z[x]/(P) with the trace form
/// weighted by 1/R'(x + 1/x), carrying multiplication by x as an isometry.
#[derive(Debug, Clone)]
pub struct PrincipalLattice {
    pub poly: IntPoly,
    pub trace: TracePoly,
    pub lattice: Lattice,
    pub mult: Isometry,
}

/// Element of the trace ring in the power basis 1, y, y^2, ... of Z[y]/(R).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistElement {
    coeffs: Vec<Int>,
}

impl TwistElement {
    pub fn new(coeffs: Vec<Int>) -> Result<Self, TwistGlueError> {
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(TwistGlueError::ZeroTwist);
        }
        Ok(TwistElement { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, TwistGlueError> {
        TwistElement::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn one() -> Self {
        TwistElement {
            coeffs: vec![Int::one()],
        }
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> IntPoly {
        IntPoly::new(self.coeffs.clone())
    }

    /// Matrix of multiplication by this element on a P-lattice with isometry
    /// f: evaluate at y = f + f^-1.
    pub fn mult_matrix(&self, f: &Isometry) -> IMat {
        let y = f.matrix().add(f.inverse().matrix());
        y.eval_poly(&self.as_poly())
    }
}

/// Build the principal P-lattice with exact trace-form Gram entries:
/// entry (i,j) = Tr(x^i (1/x)^j / R'(x + 1/x)) computed in Q[x]/(P).
pub fn principal_lattice(p: &IntPoly) -> Result<PrincipalLattice, TwistGlueError> {
    if p.is_zero() || !p.is_monic() || p.degree() % 2 != 0 || !p.is_reciprocal() {
        return Err(TwistGlueError::BadPolynomial);
    }
    if !is_irreducible(p)? {
        return Err(TwistGlueError::BadPolynomial);
    }
    let n = p.degree();
    let trace = trace_polynomial(p)?;
    let field = NumberField::new(p.clone());
    let x = field.generator();
    let x_inv = x.inv().expect("x invertible: P(0) = 1");
    let y = x.add(&x_inv);
    let r_prime = y.eval_int_poly(&trace.trace.derivative());
    let weight = r_prime.inv().expect("R' invertible in the field");
    // powers of x and 1/x
    let mut gram = IMat::zero(n, n);
    let mut xi = field.one();
    for i in 0..n {
        let mut xj_inv = field.one();
        for j in 0..n {
            let elem = xi.mul(&xj_inv).mul(&weight);
            let t = elem.trace();
            if !t.is_integer() {
                return Err(TwistGlueError::TwistNotIntegral);
            }
            *gram.at_mut(i, j) = t.to_integer();
            if j + 1 < n {
                xj_inv = xj_inv.mul(&x_inv);
            }
        }
        if i + 1 < n {
            xi = xi.mul(&x);
        }
    }
    let lattice = Lattice::new(gram)?;
    // |det| = |P(1) P(-1)|
    let expected = (p.eval_int(&Int::one()) * p.eval_int(&Int::from(-1))).abs();
    debug_assert_eq!(lattice.det().abs(), expected);
    debug_assert!(lattice.is_even());
    let companion = companion_matrix(p);
    let mult = check_isometry(&lattice, companion)
        .expect("multiplication by x preserves the trace form");
    Ok(PrincipalLattice {
        poly: p.clone(),
        trace,
        lattice,
        mult,
    })
}

pub fn companion_matrix(p: &IntPoly) -> IMat {
    let n = p.degree();
    IMat::from_fn(n, n, |i, j| {
        if j + 1 == n {
            -p.coeff(i)
        } else if i == j + 1 {
            Int::one()
        } else {
            Int::zero()
        }
    })
}

/// Twist a P-lattice with isometry by a nonzero element of the trace ring:
/// the form (v,w) becomes (a v, w); the isometry is unchanged.
pub fn twist(
    lattice: &Lattice,
    f: &Isometry,
    a: &TwistElement,
) -> Result<(Lattice, Isometry), TwistGlueError> {
    let m = a.mult_matrix(f);
    let gram = m.transpose().mul(lattice.gram());
    if !gram.is_symmetric() {
        return Err(TwistGlueError::TwistNotIntegral);
    }
    let twisted = Lattice::new(gram)?;
    if !twisted.is_nondegenerate() {
        return Err(TwistGlueError::ZeroTwist);
    }
    let f2 = check_isometry(&twisted, f.matrix().clone())
        .map_err(|_| TwistGlueError::TwistNotIntegral)?;
    Ok((twisted, f2))
}

/// Norm of a twist element down to Q, through the trace field of P.
pub fn twist_norm(p: &IntPoly, a: &TwistElement) -> Result<Rat, TwistGlueError> {
    let trace = trace_polynomial(p)?;
    let k = NumberField::new(trace.trace.clone());
    let elem = k.from_coeffs(
        a.coeffs()
            .iter()
            .map(|c| Rat::from(c.clone()))
            .collect(),
    );
    Ok(numfield::nf_norm(&elem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::cyclotomic;

    fn s8() -> IntPoly {
        IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1])
    }

    #[test]
    fn principal_s8_invariants() {
        let pl = principal_lattice(&s8()).unwrap();
        assert_eq!(pl.lattice.signature(), (3, 3, 0));
        assert_eq!(pl.lattice.det().abs(), Int::from(4));
        assert!(pl.lattice.is_even());
        let g = pl.lattice.glue_group().unwrap();
        assert_eq!(g.orders(), &[2, 2]);
        assert_eq!(pl.mult.char_poly(), s8());
    }

    #[test]
    fn principal_phi8_invariants() {
        let pl = principal_lattice(&cyclotomic(8).unwrap()).unwrap();
        assert_eq!(pl.lattice.rank(), 4);
        assert_eq!(pl.lattice.det().abs(), Int::from(4));
        assert!(pl.lattice.is_even());
    }

    #[test]
    fn principal_degree2() {
        // x^2 - 3x + 1: rank 2, |det| = |(-1)(5)| = 5, signature (1,1)
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let pl = principal_lattice(&p).unwrap();
        assert_eq!(pl.lattice.rank(), 2);
        assert_eq!(pl.lattice.det().abs(), Int::from(5));
        assert_eq!(pl.lattice.signature(), (1, 1, 0));
    }

    #[test]
    fn twist_by_one_is_identity() {
        let pl = principal_lattice(&s8()).unwrap();
        let (tw, _) = twist(&pl.lattice, &pl.mult, &TwistElement::one()).unwrap();
        assert_eq!(tw.gram(), pl.lattice.gram());
    }

    #[test]
    fn twist_s8_by_one_plus_y() {
        let pl = principal_lattice(&s8()).unwrap();
        let a = TwistElement::from_i64(&[1, 1]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        assert_eq!(tw.signature(), (1, 5, 0));
        assert!(tw.is_even());
        let g = tw.glue_group().unwrap();
        assert_eq!(g.orders(), &[2, 2]);
        // induced glue action has order 2
        assert_eq!(f.glue_action().unwrap().order(), 2);
        // determinant law: |det twist| = |det L| * |det mult|
        let m = a.mult_matrix(&pl.mult);
        assert_eq!(
            tw.det().abs(),
            (pl.lattice.det() * m.det().unwrap()).abs()
        );
    }

    #[test]
    fn twist_phi8_to_period8_lattice() {
        let pl = principal_lattice(&cyclotomic(8).unwrap()).unwrap();
        let a = TwistElement::from_i64(&[-4, -2]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        assert_eq!(tw.signature(), (2, 2, 0));
        assert!(tw.is_even());
        assert_eq!(tw.det().abs(), Int::from(256));
        let g = tw.glue_group().unwrap();
        assert_eq!(g.orders(), &[4, 4, 4, 4]);
        assert_eq!(f.glue_action().unwrap().order(), 8);
    }

    #[test]
    fn zero_twist_rejected() {
        assert!(TwistElement::from_i64(&[0, 0]).is_err());
    }
}
