//! Isometries of lattices: verification, induced glue actions, automorphism
//! groups of definite lattices by backtracking, isometry testing, searches
//! constrained by characteristic polynomial, and p-neighbor genus walks.

pub mod aut;
pub mod charpoly_search;
pub mod neighbors;

pub use aut::{automorphism_group, isometric, isometric_indefinite_witness, AutGroup};
pub use charpoly_search::{isometries_with_charpoly, IsometryClass};
pub use neighbors::{genus_explore, kneser_neighbor, GenusExploration};

use crate::budget::BudgetError;
use crate::exactalg::{ExactError, IMat, Int, IntPoly, Rat};
use crate::lattice::{Lattice, LatticeError, Sublattice};
use num_traits::Zero;

#[derive(Debug, Clone, thiserror::Error)]
pub enum IsomError {
    #[error("matrix does not preserve the form: violation at entry ({i},{j})")]
    NotIsometry { i: usize, j: usize },
    #[error("matrix shape does not match the lattice rank")]
    ShapeMismatch,
    #[error("lattice must be definite for this search")]
    NotDefinite,
    #[error("entries too large for the search kernel")]
    EntriesTooLarge,
    #[error("glue action order exceeded cap")]
    OrderCap,
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("isotropic line required: (v,v) = 0 mod p")]
    NotIsotropic,
    #[error("p must be an odd prime not dividing det(L)")]
    BadNeighborPrime,
    #[error("group order {0} exceeds the element enumeration cap")]
    GroupTooLarge(u64),
}

/// An isometry of a lattice: an integral matrix M with M^T G M = G, acting
/// on coordinate column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry {
    lattice: Lattice,
    matrix: IMat,
}

impl Isometry {
    pub fn identity(lattice: Lattice) -> Self {
        let n = lattice.rank();
        Isometry {
            lattice,
            matrix: IMat::identity(n),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &IMat {
        &self.matrix
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(v)
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            lattice: self.lattice.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self
            .matrix
            .to_qmat()
            .inverse()
            .expect("isometries are invertible")
            .to_imat()
            .expect("inverse of unimodular matrix is integral");
        Isometry {
            lattice: self.lattice.clone(),
            matrix: inv,
        }
    }

    pub fn neg(&self) -> Isometry {
        Isometry {
            lattice: self.lattice.clone(),
            matrix: self.matrix.neg(),
        }
    }

    pub fn pow(&self, e: u64) -> Isometry {
        Isometry {
            lattice: self.lattice.clone(),
            matrix: self.matrix.pow(e),
        }
    }

    pub fn char_poly(&self) -> IntPoly {
        self.matrix.char_poly().expect("square")
    }

    pub fn order(&self, cap: u64) -> Option<u64> {
        self.matrix.order(cap)
    }

    /// The action induced on the glue group.
    pub fn glue_action(&self) -> Result<GlueAction, IsomError> {
        GlueAction::of(self)
    }

    /// Restriction to an invariant sublattice, in the sublattice basis.
    /// None when the sublattice is not stable.
    pub fn restrict(&self, sub: &Sublattice) -> Option<Isometry> {
        let n = sub.rank();
        let mut cols: Vec<Vec<Int>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::from(1);
            let host_v = sub.to_host_coords(&e);
            let image = self.apply(&host_v);
            cols.push(sub.host_to_sub_coords(&image)?);
        }
        let m = IMat::from_fn(n, n, |r, c| cols[c][r].clone());
        check_isometry(&sub.induced_lattice(), m).ok()
    }
}

/// Validate that M is an isometry of L; reports the first violating entry.
pub fn check_isometry(lattice: &Lattice, matrix: IMat) -> Result<Isometry, IsomError> {
    let n = lattice.rank();
    if matrix.rows != n || matrix.cols != n {
        return Err(IsomError::ShapeMismatch);
    }
    let lhs = matrix.transpose().mul(lattice.gram()).mul(&matrix);
    for i in 0..n {
        for j in 0..n {
            if lhs.at(i, j) != lattice.gram().at(i, j) {
                return Err(IsomError::NotIsometry { i, j });
            }
        }
    }
    Ok(Isometry {
        lattice: lattice.clone(),
        matrix,
    })
}

/// The automorphism induced on the glue group, as an integer matrix on the
/// Smith generators (column j = image of generator j), with its order.
#[derive(Debug, Clone)]
pub struct GlueAction {
    orders: Vec<i64>,
    matrix: Vec<Vec<i64>>,
    order: u64,
}

impl GlueAction {
    pub fn of(f: &Isometry) -> Result<Self, IsomError> {
        let g = f.lattice().glue_group()?;
        let k = g.rank_gens();
        let n = f.lattice().rank();
        let mut matrix = Vec::with_capacity(k);
        for gen in g.gens() {
            let image: Vec<Rat> = (0..n)
                .map(|i| {
                    let mut acc = Rat::zero();
                    for j in 0..n {
                        acc += Rat::from(f.matrix.at(i, j).clone()) * &gen[j];
                    }
                    acc
                })
                .collect();
            matrix.push(g.coords_of(&image));
        }
        let orders = g.orders().to_vec();
        let order = action_order(&matrix, &orders).ok_or(IsomError::OrderCap)?;
        Ok(GlueAction {
            orders,
            matrix,
            order,
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn group_orders(&self) -> &[i64] {
        &self.orders
    }

    /// Image of an element in Smith coordinates.
    pub fn apply(&self, coords: &[i64]) -> Vec<i64> {
        apply_action(&self.matrix, &self.orders, coords)
    }

    /// Does p(action) kill the whole group?
    pub fn poly_annihilates(&self, p: &IntPoly) -> bool {
        let k = self.orders.len();
        for j in 0..k {
            let unit: Vec<i64> = (0..k).map(|r| i64::from(r == j)).collect();
            let mut acc = vec![0i64; k];
            for c in p.coeffs().iter().rev() {
                acc = apply_action(&self.matrix, &self.orders, &acc);
                for (r, a) in acc.iter_mut().enumerate() {
                    let m = Int::from(self.orders[r]);
                    let ci = i64::try_from(((c % &m) + &m) % &m).expect("reduced");
                    *a = (*a + ci * unit[r]).rem_euclid(self.orders[r]);
                }
            }
            if acc.iter().any(|&x| x != 0) {
                return false;
            }
        }
        true
    }
}

fn apply_action(matrix: &[Vec<i64>], orders: &[i64], coords: &[i64]) -> Vec<i64> {
    let k = orders.len();
    let mut out = vec![0i64; k];
    for (j, &c) in coords.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for r in 0..k {
            let prod = (matrix[j][r].rem_euclid(orders[r]) as i128)
                * (c.rem_euclid(orders[r]) as i128);
            out[r] = ((out[r] as i128 + prod).rem_euclid(orders[r] as i128)) as i64;
        }
    }
    out
}

fn action_order(matrix: &[Vec<i64>], orders: &[i64]) -> Option<u64> {
    let k = orders.len();
    if k == 0 {
        return Some(1);
    }
    let mut cur: Vec<Vec<i64>> = matrix.to_vec();
    for ord in 1..=1_000_000u64 {
        let is_id = (0..k).all(|j| {
            (0..k).all(|r| cur[j][r].rem_euclid(orders[r]) == i64::from(r == j))
        });
        if is_id {
            return Some(ord);
        }
        cur = (0..k)
            .map(|j| apply_action(matrix, orders, &cur[j]))
            .collect();
    }
    None
}

/// Saturated kernel of c(f) acting on the host of f.
pub fn kernel_sublattice(f: &Isometry, c: &IntPoly) -> Result<Sublattice, IsomError> {
    Ok(Sublattice::kernel_of_poly(f.lattice(), f.matrix(), c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn identity_and_negation_are_isometries() {
        let l = named("E8").unwrap();
        let id = check_isometry(&l, IMat::identity(8)).unwrap();
        assert_eq!(id.char_poly(), IntPoly::from_i64(&[-1, 1]).pow(8));
        let neg = check_isometry(&l, IMat::identity(8).neg()).unwrap();
        assert_eq!(neg.order(10), Some(2));
        let mut bad = IMat::identity(8);
        *bad.at_mut(0, 1) = Int::from(1);
        assert!(matches!(
            check_isometry(&l, bad),
            Err(IsomError::NotIsometry { .. })
        ));
    }

    #[test]
    fn glue_action_identity_and_negation() {
        let l = named("D4").unwrap();
        let id = Isometry::identity(l.clone());
        assert_eq!(id.glue_action().unwrap().order(), 1);
        // -1 acts trivially on a 2-elementary glue group
        let neg = id.neg();
        assert_eq!(neg.glue_action().unwrap().order(), 1);
        // on A2 the glue group is Z/3 and -1 acts with order 2
        let a2 = named("A2").unwrap();
        let neg = Isometry::identity(a2).neg();
        assert_eq!(neg.glue_action().unwrap().order(), 2);
    }

    #[test]
    fn kernel_sublattice_identity_cases() {
        let l = named("A2").unwrap();
        let id = Isometry::identity(l);
        let whole = kernel_sublattice(&id, &IntPoly::from_i64(&[-1, 1])).unwrap();
        assert_eq!(whole.rank(), 2);
        let nothing = kernel_sublattice(&id, &IntPoly::from_i64(&[1, 1])).unwrap();
        assert_eq!(nothing.rank(), 0);
    }
}
