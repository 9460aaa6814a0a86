//! Polynomials over the two-element field, packed into u64 bit masks
//! (bit i = coefficient of x^i). Degrees stay below 64 throughout.

use super::poly::IntPoly;
use super::{ExactError, Int};
use num_traits::Signed;
use once_cell::sync::Lazy;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Poly(pub u64);

impl fmt::Debug for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Poly({})", self)
    }
}

impl fmt::Display for F2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "0");
        }
        let mut first = true;
        for i in 0..64 {
            if self.0 >> i & 1 == 1 {
                if !first {
                    write!(f, "+")?;
                }
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^{}", i)?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

impl F2Poly {
    pub const ZERO: F2Poly = F2Poly(0);
    pub const ONE: F2Poly = F2Poly(1);

    pub fn from_int_poly(p: &IntPoly) -> Self {
        let mut bits = 0u64;
        for (i, c) in p.coeffs().iter().enumerate() {
            assert!(i < 64, "degree too large for F2Poly");
            if (c % Int::from(2)).abs() == Int::from(1) {
                bits |= 1 << i;
            }
        }
        F2Poly(bits)
    }

    pub fn degree(self) -> usize {
        63 - self.0.leading_zeros() as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn add(self, o: Self) -> Self {
        F2Poly(self.0 ^ o.0)
    }

    pub fn mul(self, o: Self) -> Self {
        let mut acc = 0u64;
        let mut a = self.0;
        let mut i = 0;
        while a != 0 {
            if a & 1 == 1 {
                acc ^= o.0 << i;
            }
            a >>= 1;
            i += 1;
        }
        F2Poly(acc)
    }

    pub fn rem(self, m: Self) -> Self {
        assert!(m.0 != 0);
        let dm = m.degree();
        let mut r = self.0;
        while r != 0 {
            let dr = 63 - r.leading_zeros() as usize;
            if dr < dm {
                break;
            }
            r ^= m.0 << (dr - dm);
        }
        F2Poly(r)
    }

    pub fn div_exact(self, d: Self) -> Self {
        assert!(d.0 != 0);
        let dd = d.degree();
        let mut r = self.0;
        let mut q = 0u64;
        while r != 0 {
            let dr = 63 - r.leading_zeros() as usize;
            if dr < dd {
                break;
            }
            q |= 1 << (dr - dd);
            r ^= d.0 << (dr - dd);
        }
        assert_eq!(r, 0, "inexact division over F2");
        F2Poly(q)
    }

    pub fn divides(self, other: Self) -> bool {
        other.rem(self).is_zero()
    }

    pub fn gcd(self, o: Self) -> Self {
        let (mut a, mut b) = (self, o);
        while !b.is_zero() {
            let r = a.rem(b);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = F2Poly::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    pub fn is_irreducible(self) -> bool {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return false;
        }
        irreducibles_up_to(d.min(32) / 2 + 1)
            .iter()
            .filter(|f| f.degree() <= d / 2)
            .all(|f| !f.divides(self))
    }
}

/// All irreducible polynomials over F2 of degree 1..=max_deg, by trial
/// division, in (degree, bits) order.
pub fn irreducibles_up_to(max_deg: usize) -> Vec<F2Poly> {
    static TABLE: Lazy<Vec<F2Poly>> = Lazy::new(|| {
        let mut irr: Vec<F2Poly> = vec![];
        for d in 1..=16usize {
            for low in 0..(1u64 << d) {
                let p = F2Poly(1 << d | low);
                if irr
                    .iter()
                    .filter(|f| f.degree() <= d / 2)
                    .all(|f| !f.divides(p))
                {
                    irr.push(p);
                }
            }
        }
        irr
    });
    TABLE
        .iter()
        .copied()
        .filter(|p| p.degree() <= max_deg)
        .collect()
}

/// Factor the mod-2 reduction of an integer polynomial into irreducibles
/// with multiplicity, factors sorted.
pub fn mod2_factor(p: &IntPoly) -> Result<Vec<(F2Poly, u32)>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut f = F2Poly::from_int_poly(p);
    if f.is_zero() {
        // all coefficients even: reduction is 0; treat as empty factorization
        return Ok(vec![]);
    }
    let mut out: Vec<(F2Poly, u32)> = vec![];
    for irr in irreducibles_up_to(f.degree().max(1)) {
        if f.degree() == 0 {
            break;
        }
        let mut mult = 0;
        while irr.divides(f) {
            f = f.div_exact(irr);
            mult += 1;
        }
        if mult > 0 {
            out.push((irr, mult));
        }
    }
    assert_eq!(f, F2Poly::ONE, "factorization incomplete");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::cyclotomic;

    #[test]
    fn factor_examples() {
        // seventh cyclotomic: (1+x+x^3)(1+x^2+x^3)
        let f = mod2_factor(&cyclotomic(7).unwrap()).unwrap();
        assert_eq!(f, vec![(F2Poly(0b1011), 1), (F2Poly(0b1101), 1)]);

        // x+1 stays itself
        let f = mod2_factor(&IntPoly::from_i64(&[1, 1])).unwrap();
        assert_eq!(f, vec![(F2Poly(0b11), 1)]);

        // degree-6 Salem polynomial with cube reduction (1+x+x^2)^3
        let s5 = IntPoly::from_i64(&[1, -1, 0, -1, 0, -1, 1]);
        let f = mod2_factor(&s5).unwrap();
        assert_eq!(f, vec![(F2Poly(0b111), 3)]);
    }

    #[test]
    fn irreducible_enumeration() {
        let irr = irreducibles_up_to(4);
        // degrees 1..4: x, x+1, x^2+x+1, two cubics, three quartics
        assert_eq!(irr.iter().filter(|p| p.degree() == 1).count(), 2);
        assert_eq!(irr.iter().filter(|p| p.degree() == 2).count(), 1);
        assert_eq!(irr.iter().filter(|p| p.degree() == 3).count(), 2);
        assert_eq!(irr.iter().filter(|p| p.degree() == 4).count(), 3);
    }
}
