//! Short-vector enumeration in definite lattices: exact Fincke–Pohst after
//! LLL reduction, plus a naive box oracle used as an independent check.

use super::reduction::lll_gram;
use super::sublattice::Sublattice;
use super::{Lattice, LatticeError};
use crate::budget::Budget;
use crate::exactalg::{IMat, Int, QMat, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// All vectors of a negative definite lattice with norm_bound <= (v,v) < 0,
/// one per sign class, in the coordinates of the lattice basis.
pub fn short_vectors(
    lattice: &Lattice,
    norm_bound: &Int,
    budget: &Budget,
) -> Result<Vec<Vec<Int>>, LatticeError> {
    if lattice.rank() == 0 {
        return Ok(vec![]);
    }
    if !lattice.is_negative_definite() {
        return Err(LatticeError::NotDefinite);
    }
    if !norm_bound.is_negative() {
        return Ok(vec![]);
    }
    let pos = lattice.gram().neg();
    let (t, red) = lll_gram(&pos);
    let bound = -norm_bound.clone();
    let mut found = enumerate_up_to(&red, &bound, budget)?;
    // map back to original coordinates: coords x in reduced basis -> x * T
    let n = lattice.rank();
    let out: Vec<Vec<Int>> = found
        .drain(..)
        .map(|x| {
            (0..n)
                .map(|j| {
                    let mut acc = Int::zero();
                    for (i, xi) in x.iter().enumerate() {
                        acc += xi * t.at(i, j);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(out)
}

/// Roots of a lattice: norm -2 vectors up to sign.
pub fn roots(lattice: &Lattice, budget: &Budget) -> Result<Vec<Vec<Int>>, LatticeError> {
    let two = Int::from(-2);
    Ok(short_vectors(lattice, &two, budget)?
        .into_iter()
        .filter(|v| lattice.norm(v) == two)
        .collect())
}

/// Roots of a hyperbolic lattice orthogonal to a positive-norm vector h,
/// reported in the coordinates of the ambient lattice, up to sign.
pub fn roots_in_hyperplane(
    lattice: &Lattice,
    h: &[Int],
    budget: &Budget,
) -> Result<Vec<Vec<Int>>, LatticeError> {
    if !lattice.norm(h).is_positive() {
        return Err(LatticeError::NotPositiveNorm);
    }
    let perp = Sublattice::orthogonal_complement_of_vector(lattice, h)?;
    let sub = perp.induced_lattice();
    let rts = roots(&sub, budget)?;
    Ok(rts.into_iter().map(|r| perp.to_host_coords(&r)).collect())
}

/// Exact Fincke–Pohst: all x != 0 (one per sign class) with
/// 0 < x^T gram x <= bound, for positive definite gram.
fn enumerate_up_to(
    gram: &IMat,
    bound: &Int,
    budget: &Budget,
) -> Result<Vec<Vec<Int>>, LatticeError> {
    let n = gram.rows;
    let chol = cholesky(&gram.to_qmat());
    let mut out = vec![];
    let mut x = vec![Int::zero(); n];
    let c = Rat::from(bound.clone());
    descend(&chol, n, &c, &mut x, &mut out, budget, true)?;
    Ok(out)
}

struct Chol {
    d: Vec<Rat>,
    r: Vec<Vec<Rat>>, // r[i][j] for j > i
}

fn cholesky(g: &QMat) -> Chol {
    let n = g.rows;
    let mut a = g.clone();
    let mut d = vec![Rat::zero(); n];
    let mut r = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        d[i] = a.at(i, i).clone();
        assert!(d[i].is_positive(), "form must be positive definite");
        for j in i + 1..n {
            r[i][j] = a.at(i, j) / &d[i];
        }
        for k in i + 1..n {
            for l in k..n {
                let delta = &r[i][k] * a.at(i, l).clone();
                let v = a.at(k, l) - delta;
                *a.at_mut(k, l) = v.clone();
                *a.at_mut(l, k) = v;
            }
        }
    }
    Chol { d, r }
}

/// Recursive level-by-level enumeration from the highest index down.
#[allow(clippy::too_many_arguments)]
fn descend(
    chol: &Chol,
    level: usize,
    remaining: &Rat,
    x: &mut Vec<Int>,
    out: &mut Vec<Vec<Int>>,
    budget: &Budget,
    all_zero_above: bool,
) -> Result<(), LatticeError> {
    if level == 0 {
        if !all_zero_above {
            out.push(x.clone());
        }
        return Ok(());
    }
    let i = level - 1;
    budget.charge(1)?;
    // u = sum_{j>i} r[i][j] x_j
    let mut u = Rat::zero();
    for j in level..x.len() {
        if !x[j].is_zero() {
            u += &chol.r[i][j] * Rat::from(x[j].clone());
        }
    }
    // d_i (x_i + u)^2 <= remaining
    let m = remaining / &chol.d[i];
    let (lo, hi) = sqrt_interval(&m);
    // x_i in [ceil(-hi - u), floor(hi - u)]
    let lo_x = ceil_rat(&(-&hi - &u));
    let hi_x = floor_rat(&(&hi - &u));
    let _ = lo;
    let mut xi = if all_zero_above {
        // sign-class dedup: force the topmost nonzero coordinate positive
        Int::zero().max(lo_x)
    } else {
        lo_x
    };
    while xi <= hi_x {
        let t = Rat::from(xi.clone()) + &u;
        let used = &chol.d[i] * &t * &t;
        if &used <= remaining {
            x[i] = xi.clone();
            let rem = remaining - used;
            descend(
                chol,
                i,
                &rem,
                x,
                out,
                budget,
                all_zero_above && xi.is_zero(),
            )?;
            x[i] = Int::zero();
        }
        xi += 1;
    }
    Ok(())
}

/// Rational interval [lo, hi] with lo <= sqrt(m) <= hi (m >= 0).
fn sqrt_interval(m: &Rat) -> (Rat, Rat) {
    if m.is_negative() {
        return (Rat::zero(), Rat::from(Int::from(-1)));
    }
    let num = m.numer();
    let den = m.denom();
    // sqrt(num/den) = sqrt(num*den)/den
    let prod: BigInt = num * den;
    let s = prod.sqrt();
    let lo = Rat::new(s.clone(), den.clone());
    let hi = Rat::new(&s + BigInt::one(), den.clone());
    (lo, hi)
}

fn floor_rat(x: &Rat) -> Int {
    x.floor().to_integer()
}

fn ceil_rat(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Independent oracle: brute-force box enumeration of all sign classes with
/// norm_bound <= (v,v) < 0 in a negative definite lattice. Exponential in
/// the rank; tests only.
pub fn naive_short_vectors(lattice: &Lattice, norm_bound: &Int) -> Vec<Vec<Int>> {
    assert!(lattice.is_negative_definite());
    let n = lattice.rank();
    let inv = lattice
        .gram()
        .neg()
        .to_qmat()
        .inverse()
        .expect("definite gram invertible");
    let c = Rat::from(-norm_bound.clone());
    let bounds: Vec<i64> = (0..n)
        .map(|i| {
            let m = &c * inv.at(i, i);
            let (_, hi) = sqrt_interval(&m);
            i64::try_from(floor_rat(&hi)).expect("box bound fits i64")
        })
        .collect();
    let mut out = vec![];
    let mut v = vec![0i64; n];
    loop {
        // advance odometer
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            v[i] += 1;
            if v[i] <= bounds[i] {
                break;
            }
            v[i] = -bounds[i];
            i += 1;
        }
        let vi: Vec<Int> = v.iter().map(|&a| Int::from(a)).collect();
        let norm = lattice.norm(&vi);
        if norm.is_negative() && norm >= *norm_bound {
            // sign dedup: keep the representative whose last nonzero is > 0
            if v.iter().rev().find(|&&a| a != 0).map(|&a| a > 0) == Some(true) {
                out.push(vi);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn root_counts_match_oracle() {
        let budget = Budget::new(10_000_000);
        for (name, count) in [("A2", 3usize), ("D4", 12), ("A1", 1)] {
            let l = named(name).unwrap();
            let fast = roots(&l, &budget).unwrap();
            let naive = naive_short_vectors(&l, &Int::from(-2));
            let naive_roots: Vec<_> = naive
                .into_iter()
                .filter(|v| l.norm(v) == Int::from(-2))
                .collect();
            assert_eq!(fast.len(), count, "{}", name);
            assert_eq!(naive_roots.len(), count, "{} oracle", name);
        }
    }

    #[test]
    fn e8_has_120_sign_classes() {
        let budget = Budget::new(10_000_000);
        let e8 = named("E8").unwrap();
        let r = roots(&e8, &budget).unwrap();
        assert_eq!(r.len(), 120);
        // every reported vector really has norm -2
        for v in &r {
            assert_eq!(e8.norm(v), Int::from(-2));
        }
    }

    #[test]
    fn scaled_lattice_has_no_roots() {
        let budget = Budget::new(1_000_000);
        let l = named("E8(2)").unwrap();
        assert!(roots(&l, &budget).unwrap().is_empty());
    }

    #[test]
    fn hyperplane_roots() {
        let budget = Budget::new(1_000_000);
        // in U, h = e+f is orthogonal to the single root class e-f
        let u = named("U").unwrap();
        let h = vec![Int::one(), Int::one()];
        let rts = roots_in_hyperplane(&u, &h, &budget).unwrap();
        assert_eq!(rts.len(), 1);
        assert_eq!(u.norm(&rts[0]), Int::from(-2));

        // U + A2 with h in the U part: complement is <-2> + A2, so the three
        // A2 classes plus e-f
        let l = u.direct_sum(&named("A2").unwrap());
        let h = vec![Int::one(), Int::one(), Int::zero(), Int::zero()];
        let rts = roots_in_hyperplane(&l, &h, &budget).unwrap();
        assert_eq!(rts.len(), 4);
        for r in &rts {
            assert_eq!(l.norm(r), Int::from(-2));
            assert!(l.inner(r, &h).is_zero());
        }

        let bad = vec![Int::one(), Int::zero(), Int::zero(), Int::zero()];
        assert!(roots_in_hyperplane(&l, &bad, &budget).is_err());
    }
}
