//! Arithmetic constraints on Salem factors inside the even unimodular
//! hyperbolic lattice of rank 10, and structural predicates for gluings of
//! isometries with coprime orders.

use super::TwistGlueError;
use crate::budget::Budget;
use crate::exactalg::poly::{cyclotomic, euler_phi, factorize_u64, order_dimension, IntPoly};
use crate::exactalg::realalg;
use crate::exactalg::{Int, Rat};
use crate::isomgroup::{kernel_sublattice, Isometry};
use crate::lattice::{roots_in_hyperplane, Lattice, Sublattice};
use num_traits::{One, Signed, Zero};

/// Primes allowed to divide the glue-group order of a Salem factor in the
/// rank-10 even unimodular hyperbolic lattice: the primes dividing
/// prod res(S, Phi_k) over phi(k) <= 10 - deg S.
pub fn feasible_primes(s: &IntPoly) -> Result<Vec<u64>, TwistGlueError> {
    let check = realalg::is_salem(s)?;
    if !check.is_salem {
        return Err(TwistGlueError::BadPolynomial);
    }
    if s.degree() > 10 {
        return Err(TwistGlueError::DegreeTooLarge);
    }
    let bound = (10 - s.degree()) as u64;
    let mut n = Int::one();
    for k in 1..=3 * bound * bound + 4 {
        if euler_phi(k) <= bound {
            n *= s.resultant(&cyclotomic(k)?)?;
        }
    }
    Ok(prime_divisors(&n.abs()))
}

fn prime_divisors(n: &Int) -> Vec<u64> {
    let mut out = vec![];
    let mut n = n.clone();
    if n.is_zero() {
        return out;
    }
    let mut p = Int::from(2);
    while &p * &p <= n {
        if (n.clone() % &p).is_zero() {
            out.push(u64::try_from(p.clone()).expect("small prime"));
            while (n.clone() % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > Int::one() {
        out.push(u64::try_from(n).expect("prime fits u64"));
    }
    out
}

/// The three Salem-factor constraints for (L, f) with characteristic
/// polynomial S: feasible-prime divisibility of |G(L)|, the order-dimension
/// bound on the glue action, and a small cyclotomic annihilator.
#[derive(Debug, Clone)]
pub struct SalemFactorReport {
    pub feasible: Vec<u64>,
    pub glue_order: u64,
    pub divisibility_ok: bool,
    pub order_dimension: u64,
    pub order_dimension_ok: bool,
    /// cyclotomic indices of a squarefree annihilator, when one exists
    pub annihilator: Option<Vec<u64>>,
    pub pass: bool,
}

pub fn salem_factor_check(
    l: &Lattice,
    f: &Isometry,
    s: &IntPoly,
) -> Result<SalemFactorReport, TwistGlueError> {
    if &f.char_poly() != s {
        return Err(TwistGlueError::CharPolyMismatch);
    }
    let feasible = feasible_primes(s)?;
    let g = l.glue_group()?;
    let order = g.order().unsigned_abs();
    let divisibility_ok = prime_divisors(&Int::from(order))
        .iter()
        .all(|p| feasible.contains(p));
    let action = f.glue_action()?;
    let glue_order = action.order();
    let bound = (10 - s.degree()) as u64;
    let order_dimension = order_dimension(glue_order)?;
    let order_dimension_ok = order_dimension <= bound;
    // squarefree product of distinct cyclotomics annihilating the action
    let ks: Vec<u64> = (1..=3 * bound * bound + 4)
        .filter(|&k| euler_phi(k) <= bound)
        .collect();
    let mut annihilator = None;
    let mut stack: Vec<(usize, Vec<u64>, u64)> = vec![(0, vec![], 0)];
    'outer: while let Some((i, chosen, deg)) = stack.pop() {
        if !chosen.is_empty() {
            let mut c = IntPoly::one();
            for &k in &chosen {
                c = c.mul(&cyclotomic(k)?);
            }
            if action.poly_annihilates(&c) {
                annihilator = Some(chosen.clone());
                break 'outer;
            }
        } else if action.order() == 1 {
            // trivial action is killed by Phi_1
            if bound >= 1 {
                annihilator = Some(vec![1]);
                break 'outer;
            } else if g.is_trivial() {
                annihilator = Some(vec![]);
                break 'outer;
            }
        }
        for j in i..ks.len() {
            let d = euler_phi(ks[j]);
            if deg + d <= bound {
                let mut next = chosen.clone();
                next.push(ks[j]);
                stack.push((j + 1, next, deg + d));
            }
        }
    }
    if g.is_trivial() && annihilator.is_none() {
        annihilator = Some(vec![]);
    }
    let pass = divisibility_ok && order_dimension_ok && annihilator.is_some();
    Ok(SalemFactorReport {
        feasible,
        glue_order,
        divisibility_ok,
        order_dimension,
        order_dimension_ok,
        annihilator,
        pass,
    })
}

/// Structural predicates for a gluing of isometries with coprime finite
/// orders: the glue actions restrict to the identity on the glued subgroups;
/// cyclotomic-power characteristic polynomials force p-elementary subgroups;
/// and prime-index cyclotomics force |H| in {1, p}.
#[derive(Debug, Clone)]
pub struct CoprimeGlueReport {
    pub orders: (u64, u64),
    pub identity_on_h: (bool, bool),
    /// Some((p, ok)) when chi_{f1} is a power of a p-power cyclotomic
    pub elementary: Option<(u64, bool)>,
    /// Some((p, ok)) when chi_{f1} = Phi_n with n in {5, 7, 9}
    pub order_bound: Option<(u64, bool)>,
}

pub fn coprime_order_glue_predicates(
    f1: &Isometry,
    f2: &Isometry,
    h1: &super::SubgroupSpec,
    h2: &super::SubgroupSpec,
) -> Result<CoprimeGlueReport, TwistGlueError> {
    let cap = 1_000_000;
    let (Some(o1), Some(o2)) = (f1.order(cap), f2.order(cap)) else {
        return Err(TwistGlueError::NotCoprime);
    };
    if num_integer::Integer::gcd(&o1, &o2) != 1 {
        return Err(TwistGlueError::NotCoprime);
    }
    let a1 = f1.glue_action()?;
    let a2 = f2.glue_action()?;
    let g1 = f1.lattice().glue_group()?;
    let g2 = f2.lattice().glue_group()?;
    let id_on = |action: &crate::isomgroup::GlueAction,
                 group: &crate::lattice::GlueGroup,
                 spec: &super::SubgroupSpec| {
        spec.gens
            .iter()
            .all(|g| action.apply(&group.reduce(g)) == group.reduce(g))
    };
    let identity_on_h = (id_on(&a1, &g1, h1), id_on(&a2, &g2, h2));
    let chi1 = f1.char_poly();
    let elementary = cyclotomic_power_prime(&chi1)?.map(|p| {
        let ok = h1
            .gens
            .iter()
            .all(|g| {
                let o = g1.element_order(g);
                o == 1 || o == p as i64
            })
            && h2.gens.iter().all(|g| {
                let o = g2.element_order(g);
                o == 1 || o == p as i64
            });
        (p, ok)
    });
    let order_bound = match chi_is_phi_n(&chi1, &[5, 7, 9])? {
        Some(n) => {
            let p = factorize_u64(n)[0].0;
            let h_order = subgroup_order(&g1, h1);
            let ok = h_order == 1 || h_order == p as i64;
            Some((p, ok))
        }
        None => None,
    };
    Ok(CoprimeGlueReport {
        orders: (o1, o2),
        identity_on_h,
        elementary,
        order_bound,
    })
}

fn subgroup_order(g: &crate::lattice::GlueGroup, spec: &super::SubgroupSpec) -> i64 {
    // order of the subgroup generated by the spec (small groups only)
    use std::collections::HashSet;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let zero = vec![0i64; g.orders().len()];
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for gen in &spec.gens {
            let y = g.add(&x, &g.reduce(gen));
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen.len() as i64
}

/// Some(p) when chi = Phi_{p^m}^k for a prime p and m, k >= 1.
fn cyclotomic_power_prime(chi: &IntPoly) -> Result<Option<u64>, TwistGlueError> {
    for k in 1..=64u64 {
        let facs = factorize_u64(k);
        if facs.len() != 1 {
            continue;
        }
        let phi = cyclotomic(k)?;
        if phi.degree() > chi.degree() || chi.degree() % phi.degree() != 0 {
            continue;
        }
        let e = (chi.degree() / phi.degree()) as u32;
        if &phi.pow(e) == chi {
            return Ok(Some(facs[0].0));
        }
    }
    Ok(None)
}

fn chi_is_phi_n(chi: &IntPoly, ns: &[u64]) -> Result<Option<u64>, TwistGlueError> {
    for &n in ns {
        if chi == &cyclotomic(n)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Required glue shapes for a factor with chi = Phi_n (n in {5,7,9}) glued
/// into a lattice with the invariants of U + E10(2), and the root obligation
/// on the complementary side in the boundary case.
#[derive(Debug, Clone)]
pub struct GlueShapeReport {
    pub p: u64,
    pub k: usize,
    pub shape1_ok: bool,
    pub shape2_ok: bool,
    /// Some(has_roots) when the boundary case applies (k = rank L1,
    /// signature (2, rank-2)); the theorem then demands roots in L2
    pub root_obligation: Option<bool>,
    pub pass: bool,
}

pub fn cyclic_factor_glue_shape(
    l1: &Lattice,
    l2: &Lattice,
    n1: u64,
    budget: &Budget,
) -> Result<GlueShapeReport, TwistGlueError> {
    assert!(matches!(n1, 5 | 7 | 9));
    let p = factorize_u64(n1)[0].0;
    let shape = |l: &Lattice| -> Result<Option<usize>, TwistGlueError> {
        // expect (Z/2)^k + Z/p exactly
        let g = l.glue_group()?;
        let s2 = g.sylow_part(2);
        let sp = g.sylow_part(p);
        let other: i64 = g.order().abs() / (s2.order() * sp.order());
        if other != 1 {
            return Ok(None);
        }
        if !s2.orders().iter().all(|&d| d == 2) {
            return Ok(None);
        }
        if sp.orders() != [p as i64] {
            return Ok(None);
        }
        Ok(Some(s2.orders().len()))
    };
    let k1 = shape(l1)?;
    let k2 = shape(l2)?;
    let (shape1_ok, k) = match k1 {
        Some(k) => (true, k),
        None => (false, 0),
    };
    let shape2_ok = match (k1, k2) {
        (Some(k), Some(k2)) => k2 == 10 - k,
        _ => false,
    };
    let mut root_obligation = None;
    if shape1_ok {
        let (pos, neg, _) = l1.signature();
        if k == l1.rank() && pos == 2 && neg == l1.rank() - 2 {
            // L2 must be negative definite here; the obligation is that it
            // has roots
            let has = if l2.is_negative_definite() {
                !crate::lattice::enumerate::roots(l2, budget)?.is_empty()
            } else {
                false
            };
            root_obligation = Some(has);
        }
    }
    let pass = shape1_ok && shape2_ok && root_obligation.unwrap_or(true);
    Ok(GlueShapeReport {
        p,
        k,
        shape1_ok,
        shape2_ok,
        root_obligation,
        pass,
    })
}

/// Verify the Sylow decomposition of the glue group at p for a stable
/// primitive sublattice with coprime resultant: G(L)_p decomposes as the
/// orthogonal direct sum of the pieces, compatibly with the action.
#[derive(Debug, Clone)]
pub struct SylowDecomposition {
    pub p: u64,
    pub resultant_ok: bool,
    pub orders_match: bool,
    pub forms_match: bool,
    pub pass: bool,
}

pub fn sylow_glue_decomposition(
    l: &Lattice,
    part: &Sublattice,
    f: &Isometry,
    p: u64,
) -> Result<SylowDecomposition, TwistGlueError> {
    let comp = part.orthogonal_complement()?;
    let f1 = f
        .restrict(part)
        .ok_or_else(|| TwistGlueError::InvalidGluing("sublattice not stable".into()))?;
    let f2 = f
        .restrict(&comp)
        .ok_or_else(|| TwistGlueError::InvalidGluing("complement not stable".into()))?;
    let res = f1.char_poly().resultant(&f2.char_poly())?;
    let resultant_ok = !(res.abs() % Int::from(p)).is_zero();
    if !resultant_ok {
        return Err(TwistGlueError::ResultantHypothesis(p));
    }
    let l1 = part.induced_lattice();
    let l2 = comp.induced_lattice();
    let sp = l.glue_group()?.sylow_part(p);
    let sp1 = l1.glue_group()?.sylow_part(p);
    let sp2 = l2.glue_group()?.sylow_part(p);
    let mut orders: Vec<i64> = sp1.orders().iter().chain(sp2.orders()).copied().collect();
    orders.sort_unstable();
    let mut have: Vec<i64> = sp.orders().to_vec();
    have.sort_unstable();
    let orders_match = orders == have;
    // q profiles: pushforward of the piece generators into L must reproduce
    // the q values of the p-part of G(L)
    let disc = l.bilinear_discriminant_form()?;
    let glue_l = l.glue_group()?;
    let mut forms_match = true;
    for (sub, piece) in [(part, &sp1), (&comp, &sp2)] {
        let piece_disc = sub.induced_lattice().bilinear_discriminant_form()?;
        for (gen, _) in piece.gens().iter().zip(piece.orders()) {
            // embed the dual vector into the host coordinates
            let host_vec: Vec<Rat> = {
                let n = l.rank();
                let mut acc = vec![Rat::zero(); n];
                for (i, c) in gen.iter().enumerate() {
                    for j in 0..n {
                        acc[j] += c * Rat::from(sub.basis().at(i, j).clone());
                    }
                }
                acc
            };
            let Some(coords) = try_coords(&glue_l, &host_vec) else {
                forms_match = false;
                continue;
            };
            let q_host = disc.q(&coords);
            let q_piece = {
                let sub_group = sub.induced_lattice().glue_group()?;
                let c = sub_group.coords_of(gen);
                piece_disc.q(&c)
            };
            if q_host != q_piece {
                forms_match = false;
            }
        }
    }
    let pass = resultant_ok && orders_match && forms_match;
    Ok(SylowDecomposition {
        p,
        resultant_ok,
        orders_match,
        forms_match,
        pass,
    })
}

fn try_coords(g: &crate::lattice::GlueGroup, v: &[Rat]) -> Option<Vec<i64>> {
    // coords_of panics when v is not in the dual; check first
    let n = v.len();
    let gram = g.host_gram();
    for i in 0..n {
        let mut acc = Rat::zero();
        for j in 0..n {
            acc += Rat::from(gram.at(i, j).clone()) * &v[j];
        }
        if !acc.is_integer() {
            return None;
        }
    }
    Some(g.coords_of(v))
}

/// Roots of a negative definite lattice orthogonal to nothing in particular;
/// re-exported convenience for the shape report.
pub fn has_roots(l: &Lattice, budget: &Budget) -> Result<bool, TwistGlueError> {
    if l.rank() == 0 {
        return Ok(false);
    }
    if l.is_negative_definite() {
        Ok(!crate::lattice::enumerate::roots(l, budget)?.is_empty())
    } else {
        // indefinite: search a bounded box through a positive-norm slice
        let v = l
            .positive_norm_vector()
            .ok_or_else(|| TwistGlueError::InvalidGluing("no positive direction".into()))?;
        Ok(!roots_in_hyperplane(l, &v, budget)?.is_empty())
    }
}

pub use kernel_split::kernel_split;

mod kernel_split {
    use super::*;

    /// Split (L, f) along a factorization chi = c1 * c2 into the saturated
    /// kernels of c_i(f) with their restricted isometries.
    pub fn kernel_split(
        f: &Isometry,
        c1: &IntPoly,
        c2: &IntPoly,
    ) -> Result<((Sublattice, Isometry), (Sublattice, Isometry)), TwistGlueError> {
        let k1 = kernel_sublattice(f, c1)?;
        let k2 = kernel_sublattice(f, c2)?;
        let f1 = f
            .restrict(&k1)
            .ok_or_else(|| TwistGlueError::InvalidGluing("kernel not stable".into()))?;
        let f2 = f
            .restrict(&k2)
            .ok_or_else(|| TwistGlueError::InvalidGluing("kernel not stable".into()))?;
        Ok(((k1, f1), (k2, f2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twistglue::principal::{principal_lattice, twist, TwistElement};

    fn salem_poly(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn feasible_primes_examples() {
        // degree-6 Salem with minimal polynomial 1-x-x^3-x^5+x^6
        let s5 = salem_poly(&[1, -1, 0, -1, 0, -1, 1]);
        assert_eq!(feasible_primes(&s5).unwrap(), vec![2, 5]);
        // a degree-10 Salem polynomial leaves no room: empty set
        let s1 = salem_poly(&[1, -1, 0, 0, -1, 1, -1, 0, 0, -1, 1]);
        assert_eq!(feasible_primes(&s1).unwrap(), Vec::<u64>::new());
        // degree > 10 rejected
        let too_big = salem_poly(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1])
            .mul(&IntPoly::from_i64(&[1, 1]))
            .mul(&IntPoly::from_i64(&[-1, 1]));
        assert!(feasible_primes(&too_big).is_err());
    }

    #[test]
    fn resultants_of_tau3_neighbors_are_units() {
        let s3 = salem_poly(&[1, -1, 0, -1, 1, -1, 0, -1, 1]);
        for k in [3u64, 6] {
            let r = s3.resultant(&cyclotomic(k).unwrap()).unwrap();
            assert_eq!(r.abs(), Int::one(), "k = {}", k);
        }
    }

    #[test]
    fn salem_factor_check_on_twist() {
        let s8 = salem_poly(&[1, 0, -1, -2, -1, 0, 1]);
        let pl = principal_lattice(&s8).unwrap();
        let a = TwistElement::from_i64(&[1, 1]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        let report = salem_factor_check(&tw, &f, &s8).unwrap();
        assert!(report.pass, "{:?}", report);
        assert!(report.divisibility_ok);
        assert!(report.order_dimension_ok);
        assert!(report.annihilator.is_some());
    }

    #[test]
    fn order_dimension_function() {
        assert_eq!(order_dimension(1).unwrap(), 0);
        assert_eq!(order_dimension(2).unwrap(), 1);
        assert_eq!(order_dimension(15).unwrap(), 6);
    }
}
