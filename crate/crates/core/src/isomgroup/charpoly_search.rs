//! Isometries of a definite lattice with prescribed characteristic
//! polynomial, up to conjugacy in the full automorphism group.

use super::aut::automorphism_group;
use super::{IsomError, Isometry};
use crate::budget::Budget;
use crate::exactalg::{IMat, IntPoly};
use crate::lattice::Lattice;
use std::collections::{HashMap, HashSet, VecDeque};

/// A conjugacy class representative; `class_size` is the size of the orbit
/// under conjugation by the full automorphism group.
#[derive(Debug, Clone)]
pub struct IsometryClass {
    pub representative: Isometry,
    pub class_size: usize,
}

const ELEMENT_CAP: u64 = 2_000_000;

fn key_of(m: &IMat) -> Vec<i8> {
    let mut out = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out.push(i8::try_from(m.at(i, j).clone()).expect("entry fits i8"));
        }
    }
    out
}

/// Enumerate every element of the automorphism group by closure over the
/// generators. Group order must stay under the element cap.
pub fn enumerate_group(
    l: &Lattice,
    budget: &Budget,
) -> Result<(Vec<IMat>, Vec<IMat>), IsomError> {
    let aut = automorphism_group(l, budget)?;
    if aut.order > ELEMENT_CAP {
        return Err(IsomError::GroupTooLarge(aut.order));
    }
    let mut gens: Vec<IMat> = aut
        .generators
        .iter()
        .map(|g| g.matrix().clone())
        .collect();
    // always close under inverses and -1 is not automatic: generators from
    // the stabilizer chain already include everything needed, but inverses
    // make the BFS simpler
    let inverses: Vec<IMat> = gens
        .iter()
        .map(|g| {
            g.to_qmat()
                .inverse()
                .expect("unimodular")
                .to_imat()
                .expect("integral")
        })
        .collect();
    gens.extend(inverses);
    let id = IMat::identity(l.rank());
    let mut seen: HashSet<Vec<i8>> = HashSet::new();
    seen.insert(key_of(&id));
    let mut elements = vec![id.clone()];
    let mut queue: VecDeque<IMat> = VecDeque::new();
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        budget.charge(1)?;
        for g in &gens {
            let next = g.mul(&cur);
            let k = key_of(&next);
            if seen.insert(k) {
                elements.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    debug_assert_eq!(elements.len() as u64, aut.order);
    Ok((elements, gens))
}

/// All isometries with characteristic polynomial `p`, one per conjugacy
/// class of the automorphism group, sorted canonically.
pub fn isometries_with_charpoly(
    l: &Lattice,
    p: &IntPoly,
    budget: &Budget,
) -> Result<Vec<IsometryClass>, IsomError> {
    assert_eq!(p.degree(), l.rank(), "degree must match the rank");
    let (elements, gens) = enumerate_group(l, budget)?;
    let trace_wanted = -p.coeff(p.degree().saturating_sub(1));
    let mut matching: Vec<IMat> = vec![];
    for m in &elements {
        budget.charge(1)?;
        if m.trace() != trace_wanted {
            continue;
        }
        if &m.char_poly().expect("square") == p {
            matching.push(m.clone());
        }
    }
    // conjugacy orbits within the matching set (conjugation by generators
    // reaches the whole group orbit)
    let gen_pairs: Vec<(IMat, IMat)> = gens
        .iter()
        .map(|g| {
            let ginv = g
                .to_qmat()
                .inverse()
                .expect("unimodular")
                .to_imat()
                .expect("integral");
            (g.clone(), ginv)
        })
        .collect();
    let index: HashMap<Vec<i8>, usize> = matching
        .iter()
        .enumerate()
        .map(|(i, m)| (key_of(m), i))
        .collect();
    let mut seen = vec![false; matching.len()];
    let mut classes = vec![];
    for start in 0..matching.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            budget.charge(1)?;
            for (g, ginv) in &gen_pairs {
                let conj = g.mul(&matching[i]).mul(ginv);
                let k = key_of(&conj);
                let j = *index
                    .get(&k)
                    .expect("conjugate has the same characteristic polynomial");
                if !seen[j] {
                    seen[j] = true;
                    orbit.push(j);
                    queue.push_back(j);
                }
            }
        }
        // canonical representative: smallest key in the orbit
        let rep = orbit
            .iter()
            .map(|&i| &matching[i])
            .min_by_key(|m| key_of(m))
            .expect("orbit nonempty");
        classes.push(IsometryClass {
            representative: super::check_isometry(l, rep.clone())
                .expect("group elements are isometries"),
            class_size: orbit.len(),
        });
    }
    classes.sort_by_key(|c| key_of(c.representative.matrix()));
    Ok(classes)
}

/// Convenience: classes additionally filtered by the order of the induced
/// glue action.
pub fn isometries_with_charpoly_and_glue_order(
    l: &Lattice,
    p: &IntPoly,
    glue_order: u64,
    budget: &Budget,
) -> Result<Vec<IsometryClass>, IsomError> {
    let classes = isometries_with_charpoly(l, p, budget)?;
    let mut out = vec![];
    for c in classes {
        if c.representative.glue_action()?.order() == glue_order {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn identity_class_on_a1() {
        let budget = Budget::new(10_000_000);
        let l = named("A1").unwrap();
        let classes = isometries_with_charpoly(&l, &IntPoly::from_i64(&[-1, 1]), &budget).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(classes[0].representative.matrix().is_identity());
    }

    #[test]
    fn order7_classes_on_a6_scaled() {
        let budget = Budget::new(200_000_000);
        let l = named("A6(2)").unwrap();
        let phi7 = crate::exactalg::poly::cyclotomic(7).unwrap();
        let classes = isometries_with_charpoly(&l, &phi7, &budget).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].class_size, 720);
        let f = &classes[0].representative;
        assert_eq!(f.order(10), Some(7));
        assert_eq!(f.char_poly(), phi7);
    }

    #[test]
    fn d4_period2_class_with_glue_order2() {
        let budget = Budget::new(100_000_000);
        let l = named("D4").unwrap();
        // (x-1)^3 (x+1)
        let p = IntPoly::from_i64(&[-1, 1]).pow(3).mul(&IntPoly::from_i64(&[1, 1]));
        let classes =
            isometries_with_charpoly_and_glue_order(&l, &p, 2, &budget).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].representative.order(10), Some(2));
    }
}
