//! Exact LLL reduction working on Gram matrices only (delta = 3/4).

use crate::exactalg::{IMat, Int, Rat};
use num_traits::{Signed, Zero};

/// LLL-reduce a positive definite Gram matrix. Returns (T, reduced) with
/// reduced = T * gram * T^T and T unimodular; rows of T express the reduced
/// basis in the original basis.
pub fn lll_gram(gram: &IMat) -> (IMat, IMat) {
    let n = gram.rows;
    let mut t = IMat::identity(n);
    let mut c = gram.clone(); // current Gram
    if n <= 1 {
        return (t, c);
    }
    // rational GSO data recomputed incrementally: mu[i][j] (j < i), b[i]
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut b = vec![Rat::zero(); n];
    compute_gso(&c, &mut mu, &mut b);

    let delta = Rat::new(Int::from(3), Int::from(4));
    let half = Rat::new(Int::from(1), Int::from(2));
    let mut k = 1;
    while k < n {
        // size-reduce row k against rows k-1..0
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let r = round_rat(&mu[k][j]);
                row_sub(&mut t, &mut c, k, j, &r);
                for l in 0..j {
                    let d = &mu[j][l] * Rat::from(r.clone());
                    mu[k][l] -= d;
                }
                mu[k][j] -= Rat::from(r);
            }
        }
        // Lovász condition
        let lhs = b[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            swap_rows(&mut t, &mut c, k, k - 1);
            compute_gso(&c, &mut mu, &mut b);
            k = k.max(2) - 1;
            if k == 0 {
                k = 1;
            }
        }
    }
    (t, c)
}

fn compute_gso(c: &IMat, mu: &mut [Vec<Rat>], b: &mut [Rat]) {
    let n = c.rows;
    for i in 0..n {
        for j in 0..i {
            let mut x = Rat::from(c.at(i, j).clone());
            for l in 0..j {
                let d = &mu[i][l] * &mu[j][l] * &b[l];
                x -= d;
            }
            mu[i][j] = if b[j].is_zero() { Rat::zero() } else { &x / &b[j] };
        }
        let mut x = Rat::from(c.at(i, i).clone());
        for l in 0..i {
            let d = &mu[i][l] * &mu[i][l] * &b[l];
            x -= d;
        }
        b[i] = x;
    }
}

fn round_rat(x: &Rat) -> Int {
    let two = Rat::from(Int::from(2));
    let shifted = x + Rat::new(Int::from(1), Int::from(2));
    let f = shifted.floor();
    // ties round toward even is unnecessary here; floor(x + 1/2) is fine
    let _ = two;
    f.to_integer()
}

/// row k -= r * row j on the transform, with matching Gram update.
fn row_sub(t: &mut IMat, c: &mut IMat, k: usize, j: usize, r: &Int) {
    let n = t.rows;
    for col in 0..n {
        let d = r * t.at(j, col);
        *t.at_mut(k, col) -= d;
    }
    // c = T G T^T: row k and column k change
    for col in 0..n {
        let d = r * c.at(j, col);
        *c.at_mut(k, col) -= d;
    }
    for row in 0..n {
        let d = r * c.at(row, j);
        *c.at_mut(row, k) -= d;
    }
}

fn swap_rows(t: &mut IMat, c: &mut IMat, a: usize, bb: usize) {
    let n = t.rows;
    for col in 0..n {
        let x = t.at(a, col).clone();
        let y = t.at(bb, col).clone();
        *t.at_mut(a, col) = y;
        *t.at_mut(bb, col) = x;
        let x = c.at(a, col).clone();
        let y = c.at(bb, col).clone();
        *c.at_mut(a, col) = y;
        *c.at_mut(bb, col) = x;
    }
    for row in 0..n {
        let x = c.at(row, a).clone();
        let y = c.at(row, bb).clone();
        *c.at_mut(row, a) = y;
        *c.at_mut(row, bb) = x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn lll_preserves_gram_class() {
        let e8 = named("E8").unwrap();
        let pos = e8.gram().neg();
        let (t, red) = lll_gram(&pos);
        assert_eq!(t.det().unwrap().abs(), Int::from(1));
        assert_eq!(t.mul(&pos).mul(&t.transpose()), red);
        // E8 basis is already made of minimal vectors: diagonal stays 2
        for i in 0..8 {
            assert_eq!(red.at(i, i), &Int::from(2));
        }
    }

    #[test]
    fn lll_reduces_skew_basis() {
        // badly skewed basis of Z^2
        let g = IMat::from_rows_i64(&[&[1, 0], &[0, 1]]);
        let skew = IMat::from_rows_i64(&[&[1, 0], &[100, 1]]);
        let gram = skew.mul(&g).mul(&skew.transpose());
        let (_, red) = lll_gram(&gram);
        assert_eq!(red.at(0, 0), &Int::from(1));
        assert_eq!(red.at(1, 1), &Int::from(1));
    }
}
