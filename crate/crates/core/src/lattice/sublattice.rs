//! Sublattices given by basis rows in the coordinates of a host lattice:
//! saturation, orthogonal complements, induced forms.

use super::{Lattice, LatticeError};
use crate::exactalg::{IMat, Int, QMat, Rat};
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct Sublattice {
    host: Lattice,
    basis: IMat, // rows = basis vectors in host coordinates
}

impl Sublattice {
    pub fn new(host: Lattice, basis: IMat) -> Result<Self, LatticeError> {
        assert_eq!(basis.cols, host.rank());
        let (_, rank) = basis.hermite_rows();
        if rank != basis.rows {
            return Err(LatticeError::NotIndependent);
        }
        Ok(Sublattice { host, basis })
    }

    pub fn full(host: Lattice) -> Self {
        let n = host.rank();
        Sublattice {
            host,
            basis: IMat::identity(n),
        }
    }

    pub fn host(&self) -> &Lattice {
        &self.host
    }

    pub fn basis(&self) -> &IMat {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    /// The sublattice as a lattice in its own right (induced Gram).
    pub fn induced_lattice(&self) -> Lattice {
        let g = self
            .basis
            .mul(self.host.gram())
            .mul(&self.basis.transpose());
        Lattice::new(g).expect("induced gram symmetric")
    }

    pub fn to_host_coords(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.rank());
        (0..self.host.rank())
            .map(|j| {
                let mut acc = Int::zero();
                for (i, vi) in v.iter().enumerate() {
                    acc += vi * self.basis.at(i, j);
                }
                acc
            })
            .collect()
    }

    /// Express a host vector in this basis when it lies in the sublattice.
    pub fn host_to_sub_coords(&self, v: &[Int]) -> Option<Vec<Int>> {
        // solve x * basis = v over Q, check integrality
        let bt = self.basis.to_qmat().transpose();
        let rhs: Vec<Rat> = v.iter().map(|c| Rat::from(c.clone())).collect();
        let sol = solve_overdetermined(&bt, &rhs)?;
        if sol.iter().all(|x| x.is_integer()) {
            Some(sol.into_iter().map(|x| x.to_integer()).collect())
        } else {
            None
        }
    }

    /// The primitive closure (saturation) inside the host.
    pub fn saturation(&self) -> Sublattice {
        let sat = self.basis.saturated_row_basis();
        Sublattice {
            host: self.host.clone(),
            basis: sat,
        }
    }

    pub fn is_primitive(&self) -> bool {
        let a = self.basis.hermite_rows().0;
        let b = self.saturation().basis.hermite_rows().0;
        a == b
    }

    /// Orthogonal complement inside the host (always primitive).
    pub fn orthogonal_complement(&self) -> Result<Sublattice, LatticeError> {
        // x with basis * G * x = 0
        let m = self.basis.mul(self.host.gram());
        let kernel = m.kernel_basis();
        Sublattice::new(self.host.clone(), kernel)
    }

    pub fn orthogonal_complement_of_vector(
        host: &Lattice,
        v: &[Int],
    ) -> Result<Sublattice, LatticeError> {
        let row = IMat::from_fn(1, v.len(), |_, j| v[j].clone());
        let s = Sublattice {
            host: host.clone(),
            basis: row,
        };
        s.orthogonal_complement()
    }

    /// Saturated kernel of an endomorphism polynomial: the primitive
    /// sublattice of vectors killed by p(M) (M acting on column vectors).
    pub fn kernel_of_poly(
        host: &Lattice,
        m: &IMat,
        p: &crate::exactalg::IntPoly,
    ) -> Result<Sublattice, LatticeError> {
        let pm = m.eval_poly(p);
        let kernel = pm.kernel_basis();
        Sublattice::new(host.clone(), kernel)
    }
}

/// Solve A x = b for possibly non-square A with full column rank.
fn solve_overdetermined(a: &QMat, b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.rows;
    let cols = a.cols;
    let mut aug = QMat::zero(rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            *aug.at_mut(i, j) = a.at(i, j).clone();
        }
        *aug.at_mut(i, cols) = b[i].clone();
    }
    // forward elimination
    let mut pivots = vec![];
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !aug.at(i, col).is_zero()) else {
            continue;
        };
        for j in 0..=cols {
            let x = aug.at(r, j).clone();
            let y = aug.at(p, j).clone();
            *aug.at_mut(r, j) = y;
            *aug.at_mut(p, j) = x;
        }
        let piv = aug.at(r, col).clone();
        for j in 0..=cols {
            let x = aug.at(r, j) / &piv;
            *aug.at_mut(r, j) = x;
        }
        for i in 0..rows {
            if i != r && !aug.at(i, col).is_zero() {
                let f = aug.at(i, col).clone();
                for j in 0..=cols {
                    let t = &f * aug.at(r, j);
                    *aug.at_mut(i, j) -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    // consistency
    for i in r..rows {
        if !aug.at(i, cols).is_zero() {
            return None;
        }
    }
    if pivots.len() != cols {
        return None; // not full column rank
    }
    Some((0..cols).map(|j| aug.at(j, cols).clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;
    use num_traits::{One, Signed};

    #[test]
    fn saturation_of_scaled_row() {
        let a1 = named("A1").unwrap();
        let s = Sublattice::new(a1, IMat::from_rows_i64(&[&[2]])).unwrap();
        assert!(!s.is_primitive());
        let sat = s.saturation();
        assert!(sat.is_primitive());
        assert_eq!(sat.induced_lattice().det(), Int::from(-2));
    }

    #[test]
    fn complement_of_u_in_u_plus_e8() {
        let l = named("U").unwrap().direct_sum(&named("E8").unwrap());
        let basis = IMat::from_fn(2, 10, |i, j| {
            if i == j {
                Int::from(1)
            } else {
                Int::zero()
            }
        });
        let u_sub = Sublattice::new(l, basis).unwrap();
        let comp = u_sub.orthogonal_complement().unwrap();
        assert_eq!(comp.rank(), 8);
        let ind = comp.induced_lattice();
        assert_eq!(ind.signature(), (0, 8, 0));
        assert_eq!(ind.det().abs(), Int::from(1));
        assert!(ind.is_even());
    }

    #[test]
    fn kernel_of_poly_identity() {
        let l = named("A2").unwrap();
        let id = IMat::identity(2);
        // (x-1)(id) kills everything
        let k = Sublattice::kernel_of_poly(&l, &id, &crate::exactalg::IntPoly::from_i64(&[-1, 1]))
            .unwrap();
        assert_eq!(k.rank(), 2);
        // (x+1)(id) kills nothing
        let k = Sublattice::kernel_of_poly(&l, &id, &crate::exactalg::IntPoly::from_i64(&[1, 1]))
            .unwrap();
        assert_eq!(k.rank(), 0);
    }

    #[test]
    fn host_coords_roundtrip() {
        let l = named("D4").unwrap();
        let s = Sublattice::new(
            l,
            IMat::from_rows_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]),
        )
        .unwrap();
        let v = s.to_host_coords(&[Int::from(2), Int::from(-1)]);
        let back = s.host_to_sub_coords(&v).unwrap();
        assert_eq!(back, vec![Int::from(2), Int::from(-1)]);
        assert!(s.host_to_sub_coords(&[Int::one(), Int::zero(), Int::zero(), Int::zero()]).is_none());
    }
}
