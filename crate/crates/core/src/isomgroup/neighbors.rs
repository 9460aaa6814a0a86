//! Kneser p-neighbors of even lattices and bounded genus exploration by
//! walking the neighbor graph with isometry deduplication.

use super::IsomError;
use crate::budget::Budget;
use crate::exactalg::{IMat, Int};
use crate::lattice::{is_prime_u64, Lattice};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// The p-neighbor of an even lattice along an isotropic line mod p: the
/// unique even lattice sharing an index-p sublattice with L, built from a
/// representative vector of the line.
pub fn kneser_neighbor(l: &Lattice, p: u64, line: &[i64]) -> Result<Lattice, IsomError> {
    if p < 3 || !is_prime_u64(p) {
        return Err(IsomError::BadNeighborPrime);
    }
    if !l.is_even() {
        return Err(IsomError::Lattice(crate::lattice::LatticeError::NotEven));
    }
    let pi = Int::from(p);
    if (l.det().abs() % &pi).is_zero() {
        return Err(IsomError::BadNeighborPrime);
    }
    let n = l.rank();
    assert_eq!(line.len(), n);
    let mut v: Vec<Int> = line.iter().map(|&x| Int::from(x.rem_euclid(p as i64))).collect();
    if v.iter().all(|x| x.is_zero()) {
        return Err(IsomError::NotIsotropic);
    }
    if !(l.norm(&v) % &pi).is_zero() {
        return Err(IsomError::NotIsotropic);
    }
    // adjust v so that (v,v) = 0 mod 2p^2: find w with (v,w) != 0 mod p
    let gv = l.gram().mul_vec(&v);
    let w_idx = (0..n)
        .find(|&i| !(&gv[i] % &pi).is_zero())
        .expect("nondegenerate mod p since p does not divide det");
    // v' = v + p c e_w with (v,v)/p + 2 c (v, e_w) = 0 mod p
    let s = (l.norm(&v) / &pi) % &pi;
    let a = (&gv[w_idx] * Int::from(2)) % &pi;
    let c = (-s * mod_inverse_int(&a, &pi)).mod_floor(&pi);
    v[w_idx] += &pi * c;
    debug_assert!((l.norm(&v) % (Int::from(2) * &pi * &pi)).is_zero());

    // basis of L_v = {x : (x,v) = 0 mod p}: with pivot w where (e_w,v) is a
    // unit mod p, take e_i - c_i e_w for i != w and p e_w
    let gv = l.gram().mul_vec(&v);
    let w = (0..n)
        .find(|&i| !(&gv[i] % &pi).is_zero())
        .expect("v is nonzero mod p and the form is unimodular mod p");
    let inv_w = mod_inverse_int(&gv[w], &pi);
    let mut gens: Vec<Vec<Int>> = vec![];
    for i in 0..n {
        if i == w {
            continue;
        }
        let c = (&gv[i] * &inv_w).mod_floor(&pi);
        let mut r = vec![Int::zero(); n];
        r[i] = pi.clone();
        r[w] = -(c * &pi);
        gens.push(r); // p * (e_i - c_i e_w)
    }
    let mut r = vec![Int::zero(); n];
    r[w] = &pi * &pi;
    gens.push(r); // p * (p e_w)
    gens.push(v.clone());
    let mat = IMat::from_fn(gens.len(), n, |i, j| gens[i][j].clone());
    let (h, rank) = mat.hermite_rows();
    assert_eq!(rank, n, "neighbor generators span full rank");
    // N basis = h / p; Gram_N = (B G B^T) / p^2
    let bg = h.mul(l.gram()).mul(&h.transpose());
    let p2 = &pi * &pi;
    let gram = IMat::from_fn(n, n, |i, j| {
        let x = bg.at(i, j);
        let (q, r) = x.div_rem(&p2);
        assert!(r.is_zero(), "neighbor gram must be integral");
        q
    });
    let out = Lattice::new(gram).expect("symmetric");
    debug_assert_eq!(out.det(), l.det());
    debug_assert!(out.is_even());
    Ok(out)
}

fn mod_inverse_int(a: &Int, p: &Int) -> Int {
    let a = a.mod_floor(p);
    let e = extended_gcd(&a, p);
    e.mod_floor(p)
}

fn extended_gcd(a: &Int, p: &Int) -> Int {
    let (mut old_r, mut r) = (a.clone(), p.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let new_r = &old_r - &q * &r;
        old_r = r;
        r = new_r;
        let new_s = &old_s - &q * &s;
        old_s = s;
        s = new_s;
    }
    old_s
}

/// Outcome of a bounded genus walk.
#[derive(Debug, Clone)]
pub struct GenusExploration {
    pub classes: Vec<Lattice>,
    /// true when every isotropic line of every class was processed
    pub complete: bool,
}

/// Breadth-first walk of the p-neighbor graph from a definite even seed,
/// deduplicating classes by explicit isometry search. Lines are enumerated
/// deterministically in lexicographic order over projective space mod p.
pub fn genus_explore(
    seed: &Lattice,
    p: u64,
    max_classes: usize,
    budget: &Budget,
) -> Result<GenusExploration, IsomError> {
    if !seed.is_definite() {
        return Err(IsomError::NotDefinite);
    }
    let mut classes = vec![seed.clone()];
    let mut sides = vec![super::aut::IsoSide::new(seed, budget)?];
    let mut processed = 0usize;
    let mut complete = true;
    while processed < classes.len() {
        let current = classes[processed].clone();
        processed += 1;
        for line in isotropic_lines(&current, p) {
            budget.charge(16)?;
            if classes.len() >= max_classes {
                complete = false;
                break;
            }
            let nb = kneser_neighbor(&current, p, &line)?;
            let nb_side = super::aut::IsoSide::new(&nb, budget)?;
            let mut known = false;
            for side in sides.iter() {
                if side.matches(&nb_side, budget)? {
                    known = true;
                    break;
                }
            }
            if !known {
                classes.push(nb);
                sides.push(nb_side);
            }
        }
    }
    Ok(GenusExploration { classes, complete })
}

/// Representatives of isotropic projective lines mod p (first nonzero
/// coordinate 1), lexicographic.
pub fn isotropic_lines(l: &Lattice, p: u64) -> Vec<Vec<i64>> {
    let n = l.rank();
    let mut out = vec![];
    let mut v = vec![0i64; n];
    // iterate over normalized projective representatives: position of the
    // leading 1, then free coordinates after it
    for lead in 0..n {
        let free = n - lead - 1;
        let total: u64 = (p as u64).checked_pow(free as u32).unwrap_or(0);
        for code in 0..total {
            for x in v.iter_mut() {
                *x = 0;
            }
            v[lead] = 1;
            let mut c = code;
            for k in 0..free {
                v[lead + 1 + k] = (c % p) as i64;
                c /= p;
            }
            let vi: Vec<Int> = v.iter().map(|&x| Int::from(x)).collect();
            if (l.norm(&vi) % Int::from(p)).is_zero() {
                out.push(v.clone());
            }
        }
    }
    out
}

/// Seeded sampling of isotropic lines, for larger p.
pub fn random_isotropic_line(l: &Lattice, p: u64, rng: &mut impl rand::Rng) -> Option<Vec<i64>> {
    let n = l.rank();
    for _ in 0..10_000 {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..p as i64)).collect();
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let vi: Vec<Int> = v.iter().map(|&x| Int::from(x)).collect();
        if (l.norm(&vi) % Int::from(p)).is_zero() {
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn neighbor_preserves_invariants() {
        let e8 = named("E8").unwrap();
        let lines = isotropic_lines(&e8, 3);
        assert!(!lines.is_empty());
        let nb = kneser_neighbor(&e8, 3, &lines[0]).unwrap();
        assert_eq!(nb.det(), e8.det());
        assert!(nb.is_even());
        assert_eq!(nb.signature(), e8.signature());
    }

    #[test]
    fn neighbor_rejects_bad_prime() {
        let a2 = named("A2").unwrap();
        // 3 divides det(A2)
        assert!(matches!(
            kneser_neighbor(&a2, 3, &[1, 0]),
            Err(IsomError::BadNeighborPrime)
        ));
        let e8 = named("E8").unwrap();
        assert!(matches!(
            kneser_neighbor(&e8, 4, &[1, 0, 0, 0, 0, 0, 0, 0]),
            Err(IsomError::BadNeighborPrime)
        ));
    }

    #[test]
    fn e8_genus_has_one_class() {
        let budget = Budget::new(500_000_000);
        let e8 = named("E8").unwrap();
        let g = genus_explore(&e8, 3, 8, &budget).unwrap();
        assert!(g.complete);
        assert_eq!(g.classes.len(), 1);
    }

    #[test]
    fn a1_genus_trivial() {
        let budget = Budget::new(10_000_000);
        let a1 = named("A1").unwrap();
        let g = genus_explore(&a1, 3, 4, &budget).unwrap();
        assert!(g.complete);
        assert_eq!(g.classes.len(), 1);
    }
}
