//! Real algebraic numbers: minimal polynomial plus certified isolating
//! interval, with exact sign determination via Sturm sequences.

use super::poly::{is_irreducible, qdivrem, trace_polynomial, IntPoly};
use super::sturm::{isolate_real_roots, refine_interval, SturmChain};
use super::{ExactError, Int, Rat};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// A real root of an irreducible integer polynomial, pinned down by an
/// isolating interval (lo, hi] containing exactly that root.
#[derive(Debug, Clone)]
pub struct RealAlgebraic {
    min_poly: IntPoly,
    chain: SturmChain,
    lo: Rat,
    hi: Rat,
}

impl RealAlgebraic {
    /// All real roots of an irreducible polynomial, in increasing order.
    pub fn roots_of(p: &IntPoly) -> Result<Vec<RealAlgebraic>, ExactError> {
        if !is_irreducible(p)? {
            return Err(ExactError::Reducible);
        }
        let chain = SturmChain::new(p);
        Ok(isolate_real_roots(p)
            .into_iter()
            .map(|(lo, hi)| RealAlgebraic {
                min_poly: p.clone(),
                chain: chain.clone(),
                lo,
                hi,
            })
            .collect())
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn interval(&self) -> (Rat, Rat) {
        (self.lo.clone(), self.hi.clone())
    }

    pub fn refine(&mut self, eps: &Rat) {
        let (lo, hi) = refine_interval(&self.chain, &self.lo, &self.hi, eps);
        self.lo = lo;
        self.hi = hi;
    }

    pub fn to_f64(&self) -> f64 {
        let mut me = self.clone();
        me.refine(&Rat::new(Int::one(), Int::from(1_000_000_000u64)));
        let mid = (&me.lo + &me.hi) / Rat::from(Int::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact sign of g(alpha) for a rational-coefficient polynomial g in this
    /// number. Zero is certified by reduction modulo the minimal polynomial;
    /// nonzero signs by interval refinement with a Sturm no-root certificate.
    pub fn sign_of_poly(&self, g: &[Rat]) -> Ordering {
        // reduce modulo the minimal polynomial
        let reduced = reduce_mod(g, &self.min_poly);
        if reduced.iter().all(|c| c.is_zero()) {
            return Ordering::Equal;
        }
        // clear denominators: sign is unchanged
        let mut denom = Int::one();
        for c in &reduced {
            denom = num_integer::Integer::lcm(&denom, c.denom());
        }
        let gz = IntPoly::new(
            reduced
                .iter()
                .map(|c| (c * Rat::from(denom.clone())).to_integer())
                .collect(),
        );
        let gchain = SturmChain::new(&gz);
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        let two = Rat::from(Int::from(2));
        loop {
            if gchain.count_roots(&lo, &hi) == 0 {
                // g has constant sign on (lo, hi]; evaluate at hi
                let v = gz.eval_rat(&hi);
                debug_assert!(!v.is_zero());
                return if v.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
            let mid = (&lo + &hi) / &two;
            if self.chain.count_roots(&lo, &mid) == 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn cmp_rat(&self, q: &Rat) -> Ordering {
        self.sign_of_poly(&[-q.clone(), Rat::one()])
    }
}

/// g mod m over the rationals, as a coefficient vector of length deg m.
pub fn reduce_mod(g: &[Rat], m: &IntPoly) -> Vec<Rat> {
    let gi = rat_vec_to_intpoly_scaled(g);
    let (_, r) = qdivrem(&gi.0, m);
    let mut out = vec![Rat::zero(); m.degree()];
    let scale = Rat::from(gi.1);
    for (i, c) in r.iter().enumerate() {
        out[i] = c / &scale;
    }
    out
}

fn rat_vec_to_intpoly_scaled(g: &[Rat]) -> (IntPoly, Int) {
    let mut denom = Int::one();
    for c in g {
        denom = num_integer::Integer::lcm(&denom, c.denom());
    }
    let p = IntPoly::new(
        g.iter()
            .map(|c| (c * Rat::from(denom.clone())).to_integer())
            .collect(),
    );
    (p, denom)
}

/// Outcome of a Salem test: the verdict plus, when true, the Salem root
/// itself with a certified isolating interval.
#[derive(Debug, Clone)]
pub struct SalemCheck {
    pub is_salem: bool,
    pub salem_root: Option<RealAlgebraic>,
}

/// Decide whether a monic irreducible polynomial is a Salem polynomial:
/// exactly one real root above 1 whose reciprocal is also a root, all other
/// roots on the unit circle. Decided through the trace polynomial: exactly
/// one real root above 2, all the others real inside (-2, 2).
pub fn is_salem(p: &IntPoly) -> Result<SalemCheck, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if !p.is_monic() {
        return Err(ExactError::NotMonic);
    }
    if !is_irreducible(p)? {
        return Err(ExactError::Reducible);
    }
    let no = SalemCheck {
        is_salem: false,
        salem_root: None,
    };
    if p.degree() % 2 != 0 || p.degree() < 2 || !p.is_reciprocal() {
        return Ok(no);
    }
    let m = p.degree() / 2;
    let Ok(tp) = trace_polynomial(p) else {
        return Ok(no);
    };
    let chain = SturmChain::new(&tp.trace);
    let two = Rat::from(Int::from(2));
    let total = chain.count_real_roots();
    if total != m {
        return Ok(no);
    }
    let above2 = chain.count_roots_above(&two);
    let inside = chain.count_roots(&(-two.clone()), &two);
    if above2 != 1 || inside != m - 1 {
        return Ok(no);
    }
    if tp.trace.eval_rat(&two).is_zero() || tp.trace.eval_rat(&(-two)).is_zero() {
        return Ok(no);
    }
    // the Salem number itself: the largest real root of p
    let roots = RealAlgebraic::roots_of(p)?;
    let tau = roots.into_iter().last().expect("salem root exists");
    debug_assert!(tau.cmp_rat(&Rat::one()) == Ordering::Greater);
    Ok(SalemCheck {
        is_salem: true,
        salem_root: Some(tau),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::poly::cyclotomic;
    use crate::exactalg::rat;

    #[test]
    fn salem_degree6() {
        let s8 = IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1]);
        let check = is_salem(&s8).unwrap();
        assert!(check.is_salem);
        let mut tau = check.salem_root.unwrap();
        tau.refine(&rat(1, 1_000_000));
        let (lo, hi) = tau.interval();
        assert!(lo > rat(158234, 100000) && hi < rat(158235, 100000));
    }

    #[test]
    fn salem_degree2() {
        let p = IntPoly::from_i64(&[1, -3, 1]);
        let check = is_salem(&p).unwrap();
        assert!(check.is_salem);
        let tau = check.salem_root.unwrap();
        assert!(tau.cmp_rat(&rat(26180, 10000)) == Ordering::Greater);
        assert!(tau.cmp_rat(&rat(26181, 10000)) == Ordering::Less);
    }

    #[test]
    fn cyclotomic_not_salem() {
        let check = is_salem(&cyclotomic(12).unwrap()).unwrap();
        assert!(!check.is_salem);
        // reducible input is an error, not a false
        assert!(is_salem(&IntPoly::from_i64(&[-1, 0, 1])).is_err());
    }

    #[test]
    fn sign_of_poly_certifies_zero() {
        let s8 = IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1]);
        let tau = is_salem(&s8).unwrap().salem_root.unwrap();
        // the defining relation evaluates to exactly zero
        let coeffs: Vec<Rat> = s8.coeffs().iter().map(|c| Rat::from(c.clone())).collect();
        assert_eq!(tau.sign_of_poly(&coeffs), Ordering::Equal);
        // tau - 1 > 0
        assert_eq!(tau.sign_of_poly(&[rat(-1, 1), rat(1, 1)]), Ordering::Greater);
        assert_eq!(tau.sign_of_poly(&[Rat::zero()]), Ordering::Equal);
    }
}
