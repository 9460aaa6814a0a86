//! Sturm sequences and real-root isolation with rational endpoints.

use super::poly::{pseudo_rem, IntPoly};
use super::{Int, Rat};
use num_traits::{One, Signed, Zero};

/// Sturm chain of a squarefree polynomial (positive rational rescalings of
/// the signed remainder sequence, which preserve the sign pattern).
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> Self {
        let p = p.squarefree_part();
        let mut chain = vec![p.clone()];
        if p.degree() >= 1 {
            chain.push(p.derivative());
            loop {
                let n = chain.len();
                let r = pseudo_rem(&chain[n - 2], &chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(r.neg().primitive_part());
            }
        }
        SturmChain { chain }
    }

    fn sign_changes_at(&self, x: &Rat) -> usize {
        let mut changes = 0;
        let mut last = 0i32;
        for p in &self.chain {
            let v = p.eval_rat(x);
            let s = if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    fn sign_changes_at_inf(&self, positive: bool) -> usize {
        let mut changes = 0;
        let mut last = 0i32;
        for p in &self.chain {
            if p.is_zero() {
                continue;
            }
            let lc = p.leading();
            let mut s = if lc.is_positive() { 1 } else { -1 };
            if !positive && p.degree() % 2 == 1 {
                s = -s;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_roots(&self, a: &Rat, b: &Rat) -> usize {
        assert!(a <= b);
        self.sign_changes_at(a) - self.sign_changes_at(b)
    }

    pub fn count_real_roots(&self) -> usize {
        self.sign_changes_at_inf(false) - self.sign_changes_at_inf(true)
    }

    /// Roots strictly greater than a.
    pub fn count_roots_above(&self, a: &Rat) -> usize {
        self.sign_changes_at(a) - self.sign_changes_at_inf(true)
    }
}

/// Cauchy bound: all real roots lie in (-B, B).
pub fn cauchy_bound(p: &IntPoly) -> Rat {
    let lc = p.leading().abs();
    let mut max = Int::zero();
    for c in p.coeffs() {
        if c.abs() > max {
            max = c.abs();
        }
    }
    Rat::from(max) / Rat::from(lc) + Rat::one()
}

/// Isolating intervals (a, b] for every distinct real root of p, in
/// increasing order.
pub fn isolate_real_roots(p: &IntPoly) -> Vec<(Rat, Rat)> {
    let sf = p.squarefree_part();
    if sf.degree() == 0 {
        return vec![];
    }
    let chain = SturmChain::new(&sf);
    let bound = cauchy_bound(&sf);
    let mut work = vec![(-bound.clone(), bound.clone())];
    let mut out = vec![];
    while let Some((a, b)) = work.pop() {
        let n = chain.count_roots(&a, &b);
        match n {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let mid = (&a + &b) / Rat::from(Int::from(2));
                work.push((a, mid.clone()));
                work.push((mid, b));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Bisect an isolating interval of a squarefree polynomial until its width
/// is at most eps.
pub fn refine_interval(chain: &SturmChain, lo: &Rat, hi: &Rat, eps: &Rat) -> (Rat, Rat) {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let two = Rat::from(Int::from(2));
    while &hi - &lo > *eps {
        let mid = (&lo + &hi) / &two;
        if chain.count_roots(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn count_roots_quadratic() {
        let p = IntPoly::from_i64(&[-2, 0, 1]); // x^2 - 2
        let chain = SturmChain::new(&p);
        assert_eq!(chain.count_real_roots(), 2);
        assert_eq!(chain.count_roots(&rat(0, 1), &rat(2, 1)), 1);
        assert_eq!(chain.count_roots(&rat(2, 1), &rat(3, 1)), 0);
    }

    #[test]
    fn isolation_and_refinement() {
        // (x^2-2)(x^2-3)
        let p = IntPoly::from_i64(&[-2, 0, 1]).mul(&IntPoly::from_i64(&[-3, 0, 1]));
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 4);
        let chain = SturmChain::new(&p);
        let (lo, hi) = refine_interval(&chain, &roots[3].0, &roots[3].1, &rat(1, 1000));
        // largest root is sqrt(3) = 1.7320508...
        assert!(lo < rat(17321, 10000) && hi > rat(17320, 10000));
    }

    #[test]
    fn repeated_roots_counted_once() {
        let p = IntPoly::from_i64(&[-1, 1]).pow(3);
        let chain = SturmChain::new(&p);
        assert_eq!(chain.count_real_roots(), 1);
    }
}
