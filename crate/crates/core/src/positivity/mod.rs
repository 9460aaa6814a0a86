//! Positivity of hyperbolic-lattice isometries with spectral radius above 1:
//! cyclic roots, exact Salem eigenpairs, test vectors, and the finite
//! root-set criterion deciding whether some chamber is preserved.

use crate::budget::Budget;
use crate::exactalg::numfield::{nf_kernel, NfElem};
use crate::exactalg::poly::{cyclotomic, euler_phi, IntPoly};
use crate::exactalg::realalg::{is_salem, RealAlgebraic};
use crate::exactalg::{ExactError, Int, NumberField, Rat};
use crate::isomgroup::{kernel_sublattice, IsomError, Isometry};
use crate::lattice::{roots_in_hyperplane, Lattice, LatticeError};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Debug, Clone, thiserror::Error)]
pub enum PositivityError {
    #[error("lattice is not hyperbolic")]
    NotHyperbolic,
    #[error("spectral radius is not a Salem number above 1")]
    NotSalemRadius,
    #[error("characteristic polynomial does not factor as cyclotomics times a Salem polynomial")]
    BadFactorization,
    #[error("test-vector search exhausted its budget")]
    TestVectorBudget,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Isom(#[from] IsomError),
    #[error(transparent)]
    Budget(#[from] crate::budget::BudgetError),
}

/// chi_f = (x-1)^k * c0 * salem with (x-1) not dividing c0 and c0 a product
/// of cyclotomics.
#[derive(Debug, Clone)]
pub struct CharSplit {
    pub one_mult: u32,
    pub c0: IntPoly,
    pub salem: IntPoly,
}

pub fn split_char_poly(chi: &IntPoly) -> Result<CharSplit, PositivityError> {
    let mut rest = chi.clone();
    let mut cyclo = IntPoly::one();
    let deg = chi.degree() as u64;
    let mut one_mult = 0u32;
    let x_minus_1 = cyclotomic(1)?;
    loop {
        let (q, r) = rest.divrem_monic(&x_minus_1);
        if r.is_zero() {
            one_mult += 1;
            rest = q;
        } else {
            break;
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for k in 2..=(2 * deg * deg + 4) {
            if euler_phi(k) > deg {
                continue;
            }
            let phi = cyclotomic(k)?;
            loop {
                let (q, r) = rest.divrem_monic(&phi);
                if r.is_zero() {
                    cyclo = cyclo.mul(&phi);
                    rest = q;
                    changed = true;
                } else {
                    break;
                }
            }
        }
    }
    let check = is_salem(&rest).map_err(|_| PositivityError::BadFactorization)?;
    if !check.is_salem {
        return Err(PositivityError::NotSalemRadius);
    }
    Ok(CharSplit {
        one_mult,
        c0: cyclo,
        salem: rest,
    })
}

/// Exact eigenvectors for the Salem eigenvalue and its inverse, with entries
/// in Q(tau), normalized so that (v, w) > 0 in the real embedding tau > 1.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub field: Arc<NumberField>,
    pub tau: RealAlgebraic,
    pub v: Vec<NfElem>,
    pub w: Vec<NfElem>,
}

impl EigenPair {
    /// (r, v)(r, w) sign for an integer vector r; scale-invariant.
    pub fn crossing_sign(&self, l: &Lattice, r: &[Int]) -> Ordering {
        let gv = l.gram().mul_vec(r);
        let pair = |vec: &[NfElem]| -> NfElem {
            let mut acc = self.field.zero();
            for (c, e) in gv.iter().zip(vec.iter()) {
                acc = acc.add(&e.scale(&Rat::from(c.clone())));
            }
            acc
        };
        let a = pair(&self.v);
        let b = pair(&self.w);
        let prod = a.mul(&b);
        prod.sign_at(&self.tau)
    }
}

pub fn salem_eigenpair(l: &Lattice, f: &Isometry) -> Result<EigenPair, PositivityError> {
    let split = split_char_poly(&f.char_poly())?;
    let tau = is_salem(&split.salem)?
        .salem_root
        .expect("salem certified");
    let field = NumberField::new(split.salem.clone());
    let x = field.generator();
    let x_inv = x.inv().expect("tau invertible");
    let n = l.rank();
    let to_nf = |m: &crate::exactalg::IMat, shift: &NfElem| -> Vec<Vec<NfElem>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = field.from_rat(Rat::from(m.at(i, j).clone()));
                        if i == j {
                            e = e.sub(shift);
                        }
                        e
                    })
                    .collect()
            })
            .collect()
    };
    let mv = to_nf(f.matrix(), &x);
    let kv = nf_kernel(&field, &mv);
    let mw = to_nf(f.matrix(), &x_inv);
    let kw = nf_kernel(&field, &mw);
    assert_eq!(kv.len(), 1, "salem eigenvalue is simple");
    assert_eq!(kw.len(), 1, "inverse eigenvalue is simple");
    let mut v = kv.into_iter().next().unwrap();
    let w = kw.into_iter().next().unwrap();
    // normalize (v, w) > 0
    let mut ip = field.zero();
    for i in 0..n {
        for j in 0..n {
            let g = Rat::from(l.gram().at(i, j).clone());
            ip = ip.add(&v[i].mul(&w[j]).scale(&g));
        }
    }
    match ip.sign_at(&tau) {
        Ordering::Equal => unreachable!("(v,w) never vanishes for a salem pair"),
        Ordering::Less => {
            for e in v.iter_mut() {
                *e = e.neg();
            }
        }
        Ordering::Greater => {}
    }
    // normalize magnitudes so test vectors come out small; the scale of an
    // eigenvector is free and float estimates only steer performance here
    let v = rescale_to_unit(&field, v, &tau);
    let w = rescale_to_unit(&field, w, &tau);
    Ok(EigenPair { field, tau, v, w })
}

fn rescale_to_unit(
    field: &Arc<NumberField>,
    vec: Vec<NfElem>,
    tau: &RealAlgebraic,
) -> Vec<NfElem> {
    let t = tau.to_f64();
    let approx = |e: &NfElem| -> f64 {
        let mut acc = 0.0;
        for c in e.coeffs().iter().rev() {
            acc = acc * t + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    };
    let mut best: Option<(f64, NfElem)> = None;
    for e in &vec {
        let a = approx(e).abs();
        if a.is_finite() && best.as_ref().map(|(b, _)| a > *b).unwrap_or(true) && a > 0.0 {
            best = Some((a, e.clone()));
        }
    }
    let Some((mag, biggest)) = best else { return vec };
    if !(1e-12..=1e12).contains(&mag) {
        // degenerate float estimate: fall back to exact division by the
        // largest coordinate
        if let Some(inv) = biggest.inv() {
            return vec.iter().map(|e| e.mul(&inv)).collect();
        }
        return vec;
    }
    if let Some(inv) = biggest.inv() {
        vec.iter().map(|e| e.mul(&inv)).collect()
    } else {
        let _ = field;
        vec
    }
}

/// Roots with a vanishing f-orbit sum: exactly the roots of the saturated
/// kernel of c0(f), reported in ambient coordinates with the cyclic sum
/// verified on each witness.
pub fn cyclic_roots(
    l: &Lattice,
    f: &Isometry,
    budget: &Budget,
) -> Result<Vec<Vec<Int>>, PositivityError> {
    debug_assert_eq!(l.gram(), f.lattice().gram());
    let split = split_char_poly(&f.char_poly())?;
    if split.c0.degree() == 0 {
        return Ok(vec![]);
    }
    let kernel = kernel_sublattice(f, &split.c0)?;
    if kernel.rank() == 0 {
        return Ok(vec![]);
    }
    let sub = kernel.induced_lattice();
    debug_assert!(sub.is_negative_definite());
    let rts = crate::lattice::enumerate::roots(&sub, budget)?;
    let out: Vec<Vec<Int>> = rts
        .into_iter()
        .map(|r| kernel.to_host_coords(&r))
        .collect();
    // verify the defining identity on each reported root
    for r in &out {
        let mut sum = r.clone();
        let mut cur = r.clone();
        let mut ok = false;
        for _ in 1..=1 << 12 {
            cur = f.apply(&cur);
            for (s, c) in sum.iter_mut().zip(cur.iter()) {
                *s += c;
            }
            if sum.iter().all(|x| x.is_zero()) {
                ok = true;
                break;
            }
        }
        assert!(ok, "cyclic witness failed the orbit-sum identity");
    }
    Ok(out)
}

/// Deterministic test-vector construction: h = floor(n (v + w) + z) with n
/// doubling from 2^10 and z drawn from a seeded generator, until both
/// (h,h) > 0 and (h, f h) > 0.
pub fn test_vector(
    l: &Lattice,
    f: &Isometry,
    pair: &EigenPair,
    seed: u64,
    budget: &Budget,
) -> Result<Vec<Int>, PositivityError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = l.rank();
    let sum: Vec<NfElem> = (0..n).map(|i| pair.v[i].add(&pair.w[i])).collect();
    // the eigenpair is normalized to unit height, so start from coordinates
    // of magnitude ~2^2 and double from there (n = 2^10 times a fixed
    // 2^-8 normalization of the eigenvector scale)
    let mut scale = Rat::new(Int::from(1 << 10), Int::from(1 << 8));
    for _round in 0..24 {
        budget.charge(16)?;
        for _try in 0..8 {
            let z: Vec<i64> = (0..n).map(|_| rng.gen_range(-2i64..=2)).collect();
            let mut h = Vec::with_capacity(n);
            for i in 0..n {
                let coord = sum[i].scale(&scale);
                let shifted = coord.add(&pair.field.from_rat(Rat::from(Int::from(z[i]))));
                h.push(floor_of_elem(&shifted, &pair.tau));
            }
            if l.norm(&h).is_positive() {
                let fh = f.apply(&h);
                if l.inner(&h, &fh).is_positive() {
                    return Ok(h);
                }
            }
        }
        scale *= Rat::from(Int::from(2));
    }
    Err(PositivityError::TestVectorBudget)
}

/// Exact floor of an element of Q(tau) in the real embedding.
fn floor_of_elem(e: &NfElem, tau: &RealAlgebraic) -> Int {
    // rational elements have an exact floor
    if e.coeffs().iter().skip(1).all(|c| c.is_zero()) {
        return e.coeffs()[0].floor().to_integer();
    }
    // bracket by refining tau until the enclosure pins the floor
    let mut tau = tau.clone();
    loop {
        let (lo, hi) = tau.interval();
        let (elo, ehi) = interval_eval(e.coeffs(), &lo, &hi);
        let flo = elo.floor().to_integer();
        let fhi = ehi.floor().to_integer();
        if flo == fhi {
            // guard the boundary: floor is settled only if ehi is not an
            // exact integer equal to its floor... the open interval suffices
            // because e is irrational here
            return flo;
        }
        let eps = (&hi - &lo) / Rat::from(Int::from(4));
        tau.refine(&eps);
    }
}

/// Interval Horner evaluation with exact rational endpoints.
fn interval_eval(coeffs: &[Rat], lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut alo = Rat::zero();
    let mut ahi = Rat::zero();
    for c in coeffs.iter().rev() {
        // [alo, ahi] * [lo, hi]
        let candidates = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
        let mut nlo = candidates[0].clone();
        let mut nhi = candidates[0].clone();
        for x in &candidates[1..] {
            if *x < nlo {
                nlo = x.clone();
            }
            if *x > nhi {
                nhi = x.clone();
            }
        }
        alo = nlo + c;
        ahi = nhi + c;
    }
    (alo, ahi)
}

/// The finite set of integer pairs (a, b), a > 0 > b, compatible with the
/// ternary-sublattice determinant constraint for given x = (h,h),
/// y = (h, f h).
pub fn crossing_pairs(x: &Int, y: &Int) -> Vec<(Int, Int)> {
    assert!(x.is_positive() && y.is_positive());
    let two = Int::from(2);
    let margin = &two * (y * y - x * x);
    if !margin.is_positive() {
        return vec![];
    }
    // x a^2 <= margin and x b^2 <= margin
    let bound = (&margin / x).sqrt() + Int::one();
    let mut out = vec![];
    let mut a = Int::one();
    while &a * &a * x <= margin {
        let mut b = -Int::one();
        while &b * &b * x <= margin {
            // -2x^2 + 2y^2 + 2aby >= x(a^2 + b^2)
            let lhs = -&two * x * x + &two * y * y + &two * &a * &b * y;
            let rhs = x * (&a * &a + &b * &b);
            if lhs >= rhs {
                out.push((a.clone(), b.clone()));
            }
            b -= 1;
        }
        a += 1;
    }
    let _ = bound;
    out
}

/// The obstruction data for a test vector: roots orthogonal to h, and roots
/// crossing between h and f(h) (assembled from the hyperplanes of the
/// auxiliary vectors -b h + a f(h)).
pub fn obstruction_sets(
    l: &Lattice,
    f: &Isometry,
    h: &[Int],
    budget: &Budget,
) -> Result<(Vec<Vec<Int>>, Vec<Vec<Int>>), PositivityError> {
    let x = l.norm(h);
    let fh = f.apply(h);
    let y = l.inner(h, &fh);
    assert!(x.is_positive() && y.is_positive(), "test vector precondition");
    let r_h = roots_in_hyperplane(l, h, budget)?;
    let pairs = crossing_pairs(&x, &y);
    let mut aux: Vec<Vec<Int>> = pairs
        .iter()
        .map(|(a, b)| {
            let mut v: Vec<Int> = (0..l.rank())
                .map(|i| -b * &h[i] + a * &fh[i])
                .collect();
            // proportional vectors cut the same hyperplane
            let mut g = Int::zero();
            for c in &v {
                g = num_integer::Integer::gcd(&g, c);
            }
            if g > Int::one() {
                for c in v.iter_mut() {
                    *c = &*c / &g;
                }
            }
            normalize_sign_class(&mut v);
            v
        })
        .collect();
    aux.sort();
    aux.dedup();
    let chunks: Vec<Result<Vec<Vec<Int>>, PositivityError>> = aux
        .par_iter()
        .map(|hp| {
            roots_in_hyperplane(l, hp, budget).map_err(PositivityError::from)
        })
        .collect();
    let mut s_h: Vec<Vec<Int>> = vec![];
    for c in chunks {
        s_h.extend(c?);
    }
    // normalize sign classes and drop the ones already in R_h
    for r in s_h.iter_mut() {
        normalize_sign_class(r);
    }
    s_h.sort();
    s_h.dedup();
    let mut r_h_norm: Vec<Vec<Int>> = r_h.clone();
    for r in r_h_norm.iter_mut() {
        normalize_sign_class(r);
    }
    s_h.retain(|r| !r_h_norm.contains(r));
    // membership test: crossing roots have opposite-sign pairings
    s_h.retain(|r| {
        let a = l.inner(r, h);
        let b = l.inner(r, &fh);
        (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive())
    });
    Ok((r_h, s_h))
}

fn normalize_sign_class(r: &mut [Int]) {
    if let Some(first) = r.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in r.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

/// Why an isometry fails to be positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// a root with vanishing orbit sum
    Cyclic(Vec<Int>),
    /// a root separating the eigenvector segment: (r,v)(r,w) < 0
    SignCrossing(Vec<Int>),
}

/// Outcome of the positivity test, with the certificate data that decided it.
#[derive(Debug, Clone)]
pub struct PositivityVerdict {
    pub positive: bool,
    pub witness: Option<Obstruction>,
    pub h: Vec<Int>,
    pub cyclic: Vec<Vec<Int>>,
    pub roots_h: Vec<Vec<Int>>,
    pub roots_crossing: Vec<Vec<Int>>,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5A1E;

/// Decide positivity of f on a hyperbolic lattice with spectral radius
/// above 1, optionally with a caller-supplied test vector.
pub fn positivity_check(
    l: &Lattice,
    f: &Isometry,
    supplied_h: Option<&[Int]>,
    seed: u64,
    budget: &Budget,
) -> Result<PositivityVerdict, PositivityError> {
    if !l.is_hyperbolic() {
        return Err(PositivityError::NotHyperbolic);
    }
    let cyclic = cyclic_roots(l, f, budget)?;
    if let Some(r) = cyclic.first() {
        return Ok(PositivityVerdict {
            positive: false,
            witness: Some(Obstruction::Cyclic(r.clone())),
            h: vec![],
            cyclic,
            roots_h: vec![],
            roots_crossing: vec![],
            seed,
        });
    }
    let pair = salem_eigenpair(l, f)?;
    let h: Vec<Int> = match supplied_h {
        Some(h) => {
            assert!(l.norm(h).is_positive(), "supplied h must have h^2 > 0");
            let fh = f.apply(h);
            assert!(
                l.inner(h, &fh).is_positive(),
                "supplied h must satisfy (h, f h) > 0"
            );
            h.to_vec()
        }
        None => test_vector(l, f, &pair, seed, budget)?,
    };
    let (roots_h, roots_crossing) = obstruction_sets(l, f, &h, budget)?;
    for r in roots_h.iter().chain(roots_crossing.iter()) {
        if pair.crossing_sign(l, r) == Ordering::Less {
            return Ok(PositivityVerdict {
                positive: false,
                witness: Some(Obstruction::SignCrossing(r.clone())),
                h,
                cyclic,
                roots_h,
                roots_crossing,
                seed,
            });
        }
    }
    Ok(PositivityVerdict {
        positive: true,
        witness: None,
        h,
        cyclic,
        roots_h,
        roots_crossing,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;
    use crate::twistglue::principal::{principal_lattice, twist, TwistElement};

    fn s8() -> IntPoly {
        IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1])
    }

    #[test]
    fn split_charpoly_of_mixed_product() {
        let chi = IntPoly::from_i64(&[-1, 1])
            .pow(3)
            .mul(&IntPoly::from_i64(&[1, 1]))
            .mul(&s8());
        let split = split_char_poly(&chi).unwrap();
        assert_eq!(split.one_mult, 3);
        assert_eq!(split.c0, IntPoly::from_i64(&[1, 1]));
        assert_eq!(split.salem, s8());
    }

    #[test]
    fn eigenpair_on_twisted_lattice() {
        // the twist by 1 + y of the degree-6 principal lattice is hyperbolic
        let pl = principal_lattice(&s8()).unwrap();
        let a = TwistElement::from_i64(&[1, 1]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        assert!(tw.is_hyperbolic());
        let pair = salem_eigenpair(&tw, &f).unwrap();
        // f v = tau v checked symbolically: (F - x) v = 0 over the field
        let n = tw.rank();
        let x = pair.field.generator();
        for i in 0..n {
            let mut acc = pair.field.zero();
            for j in 0..n {
                let c = Rat::from(f.matrix().at(i, j).clone());
                acc = acc.add(&pair.v[j].scale(&c));
            }
            acc = acc.sub(&pair.v[i].mul(&x));
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn positivity_of_salem_twist() {
        let budget = Budget::new(100_000_000);
        let pl = principal_lattice(&s8()).unwrap();
        let a = TwistElement::from_i64(&[1, 1]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        let verdict = positivity_check(&tw, &f, None, DEFAULT_SEED, &budget).unwrap();
        // a lattice with no roots at all is vacuously positive... the twist
        // may have roots; either way the verdict must be reproducible across
        // seeds
        let verdict2 = positivity_check(&tw, &f, None, 12345, &budget).unwrap();
        assert_eq!(verdict.positive, verdict2.positive);
    }

    #[test]
    fn crossing_pairs_finite_and_signed() {
        let pairs = crossing_pairs(&Int::from(4), &Int::from(6));
        assert!(!pairs.is_empty());
        for (a, b) in &pairs {
            assert!(a.is_positive() && b.is_negative());
        }
        // y <= x gives the empty set
        assert!(crossing_pairs(&Int::from(5), &Int::from(5)).is_empty());
        assert!(crossing_pairs(&Int::from(9), &Int::from(5)).is_empty());
    }

    #[test]
    fn reflection_composition_loses_positivity() {
        // U + A1: compose a positive isometry with the reflection in a root
        // and watch a cyclic or crossing root appear
        let budget = Budget::new(100_000_000);
        let pl = principal_lattice(&s8()).unwrap();
        let a = TwistElement::from_i64(&[1, 1]).unwrap();
        let (tw, f) = twist(&pl.lattice, &pl.mult, &a).unwrap();
        let base = positivity_check(&tw, &f, None, DEFAULT_SEED, &budget).unwrap();
        if !base.positive {
            // already not positive: witness must verify
            assert!(base.witness.is_some());
            return;
        }
        // find a root of tw if any; if none this construction is skipped
        let rts = {
            let h = base.h.clone();
            let mut all = roots_in_hyperplane(&tw, &h, &budget).unwrap_or_default();
            if all.is_empty() {
                // look for roots near the lattice: scan small vectors via
                // the crossing machinery of another h; fall back to skip
                all = vec![];
            }
            all
        };
        if let Some(r) = rts.first() {
            // s_r(x) = x + (x, r) r
            let n = tw.rank();
            let refl = crate::exactalg::IMat::from_fn(n, n, |i, j| {
                let mut e = vec![Int::zero(); n];
                e[j] = Int::one();
                let ip = tw.inner(&e, r);
                let v = if i == j { Int::one() } else { Int::zero() };
                v + ip * &r[i]
            });
            let sr = crate::isomgroup::check_isometry(&tw, refl).unwrap();
            let g = sr.compose(&f);
            if split_char_poly(&g.char_poly()).is_ok() {
                let v = positivity_check(&tw, &g, None, DEFAULT_SEED, &budget).unwrap();
                if !v.positive {
                    assert!(v.witness.is_some());
                }
            }
        }
    }
}
