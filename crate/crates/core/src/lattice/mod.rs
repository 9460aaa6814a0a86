//! Lattices: integral symmetric bilinear forms given by Gram matrices,
//! named constructors, rescaling, duals and glue groups, sublattices,
//! and short-vector enumeration.

pub mod enumerate;
pub mod glue;
pub mod reduction;
pub mod sublattice;

pub use enumerate::{naive_short_vectors, roots_in_hyperplane, short_vectors};
pub use glue::{DiscriminantForm, GlueGroup};
pub use sublattice::Sublattice;

use crate::exactalg::matrix::signature;
use crate::exactalg::{ExactError, IMat, Int, QMat, Rat};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, thiserror::Error)]
pub enum LatticeError {
    #[error("gram matrix must be square and symmetric")]
    BadGram,
    #[error("lattice is degenerate (det = 0)")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("rescaled form is not integral")]
    NotIntegral,
    #[error("rescale by 1/{p} needs an elementary p-part of full length; violating glue element {witness:?}")]
    HalvingHypothesis { p: u64, witness: Vec<Rat> },
    #[error("unknown lattice name: {0}")]
    UnknownName(String),
    #[error("even unimodular signature needs r = s mod 8, got ({r},{s})")]
    BadUnimodularSignature { r: usize, s: usize },
    #[error("vector has nonpositive square where positive is required")]
    NotPositiveNorm,
    #[error("exact arithmetic error: {0}")]
    Exact(#[from] ExactError),
    #[error("glue group order does not fit in 64 bits")]
    GlueTooLarge,
    #[error(transparent)]
    Budget(#[from] crate::budget::BudgetError),
    #[error("vectors are not linearly independent")]
    NotIndependent,
}

/// An integral lattice: a symmetric Gram matrix, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: IMat,
    label: Option<String>,
}

impl Lattice {
    pub fn new(gram: IMat) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::BadGram);
        }
        Ok(Lattice { gram, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows
    }

    pub fn det(&self) -> Int {
        self.gram.det().expect("gram is square")
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| (self.gram.at(i, i) % Int::from(2)).is_zero())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// (positive, negative, null) inertia counts.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature(&self.gram.to_qmat()).expect("gram symmetric")
    }

    pub fn is_negative_definite(&self) -> bool {
        let (p, n, z) = self.signature();
        p == 0 && z == 0 && n == self.rank()
    }

    pub fn is_positive_definite(&self) -> bool {
        let (p, n, z) = self.signature();
        n == 0 && z == 0 && p == self.rank()
    }

    pub fn is_definite(&self) -> bool {
        self.is_negative_definite() || self.is_positive_definite()
    }

    pub fn is_hyperbolic(&self) -> bool {
        let (p, n, z) = self.signature();
        p == 1 && z == 0 && n == self.rank() - 1 && self.rank() > 1
    }

    pub fn inner(&self, x: &[Int], y: &[Int]) -> Int {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(gy.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[Int]) -> Int {
        self.inner(x, x)
    }

    pub fn inner_rat(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.rank() {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.rank() {
                acc += &x[i] * &y[j] * Rat::from(self.gram.at(i, j).clone());
            }
        }
        acc
    }

    /// The glue group L*/L.
    pub fn glue_group(&self) -> Result<GlueGroup, LatticeError> {
        GlueGroup::of(self)
    }

    /// Discriminant quadratic form on the glue group (even lattices only).
    pub fn discriminant_form(&self) -> Result<DiscriminantForm, LatticeError> {
        if !self.is_even() {
            return Err(LatticeError::NotEven);
        }
        Ok(DiscriminantForm::of(self.glue_group()?))
    }

    /// Bilinear discriminant data, available for odd lattices too.
    pub fn bilinear_discriminant_form(&self) -> Result<DiscriminantForm, LatticeError> {
        Ok(DiscriminantForm::of(self.glue_group()?))
    }

    /// L(a): same module, form scaled by a; must stay integral. For a = 1/p
    /// the halving hypothesis is enforced (elementary p-part of full length,
    /// and integral self-pairings on the 2-part when p = 2), which guarantees
    /// the result is again even.
    pub fn rescale(&self, a: &Rat) -> Result<Lattice, LatticeError> {
        let scaled = QMat::from_fn(self.rank(), self.rank(), |i, j| {
            a * Rat::from(self.gram.at(i, j).clone())
        });
        if !scaled.is_integral() {
            return Err(LatticeError::NotIntegral);
        }
        if a.numer().abs().is_one() && !a.denom().is_one() {
            let p64 = u64::try_from(a.denom().clone()).map_err(|_| LatticeError::NotIntegral)?;
            if is_prime_u64(p64) {
                self.check_halving_hypothesis(p64)?;
            }
        }
        let mut out = Lattice::new(scaled.to_imat().expect("checked integral"))?;
        if let Some(l) = &self.label {
            out.label = Some(format!("{}({})", l, a));
        }
        Ok(out)
    }

    fn check_halving_hypothesis(&self, p: u64) -> Result<(), LatticeError> {
        let g = self.glue_group()?;
        let sylow = g.sylow_part(p);
        let full_length = sylow.orders().len() == self.rank()
            && sylow.orders().iter().all(|&d| d == p as i64);
        if !full_length {
            let witness = sylow.gens().first().cloned().unwrap_or_default();
            return Err(LatticeError::HalvingHypothesis { p, witness });
        }
        if p == 2 {
            let disc = DiscriminantForm::of(g.clone());
            for (i, gen) in sylow.gens().iter().enumerate() {
                let b = disc.b_raw(gen, gen);
                if !b.is_integer() {
                    let _ = i;
                    return Err(LatticeError::HalvingHypothesis {
                        p,
                        witness: gen.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let m = other.rank();
        let gram = IMat::from_fn(n + m, n + m, |i, j| {
            if i < n && j < n {
                self.gram.at(i, j).clone()
            } else if i >= n && j >= n {
                other.gram.at(i - n, j - n).clone()
            } else {
                Int::zero()
            }
        });
        Lattice { gram, label: None }
    }

    /// Name II_{r,s} when this lattice is even unimodular: indefinite ones
    /// are classified by signature alone; definite ones are recognized up to
    /// rank 8 (the unique class in rank 8, trivial in rank 0).
    pub fn classify_even_unimodular(&self) -> Option<(usize, usize)> {
        if !self.is_even() || !self.is_unimodular() {
            return None;
        }
        let (p, n, z) = self.signature();
        if z != 0 {
            return None;
        }
        if p > 0 && n > 0 {
            return Some((p, n));
        }
        // definite: rank 0 or the unique rank-8 class
        match p + n {
            0 => Some((0, 0)),
            8 => Some((p, n)),
            _ => None,
        }
    }

    /// For an even lattice with 2-elementary glue group: (l, delta) where l
    /// is the length and delta = 0 iff all discriminant-form values are
    /// integral. None if the glue group is not 2-elementary.
    pub fn two_elementary_profile(&self) -> Result<Option<(usize, u8)>, LatticeError> {
        let g = self.glue_group()?;
        if !g.orders().iter().all(|&d| d == 2) {
            return Ok(None);
        }
        let disc = DiscriminantForm::of(g.clone());
        let mut delta = 0u8;
        for gen in g.gens() {
            if !disc.q_raw(gen).is_integer() {
                delta = 1;
                break;
            }
        }
        Ok(Some((g.orders().len(), delta)))
    }

    /// A lattice vector of positive norm (hyperbolic or indefinite lattices),
    /// found from the rational diagonalization.
    pub fn positive_norm_vector(&self) -> Option<Vec<Int>> {
        // try standard basis vectors and small combinations first
        let n = self.rank();
        for i in 0..n {
            if self.gram.at(i, i).is_positive() {
                let mut v = vec![Int::zero(); n];
                v[i] = Int::one();
                return Some(v);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for (a, b) in [(1i64, 1i64), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)] {
                    let mut v = vec![Int::zero(); n];
                    v[i] = Int::from(a);
                    v[j] = Int::from(b);
                    if self.norm(&v).is_positive() {
                        return Some(v);
                    }
                }
            }
        }
        // rational congruence diagonalization: transport a positive direction
        let (pos, _, _) = self.signature();
        if pos == 0 {
            return None;
        }
        let diag = diagonalizing_transform(&self.gram.to_qmat());
        for (row, val) in diag {
            if val.is_positive() {
                // clear denominators
                let mut denom = Int::one();
                for c in &row {
                    denom = num_integer::Integer::lcm(&denom, c.denom());
                }
                let v: Vec<Int> = row
                    .iter()
                    .map(|c| (c * Rat::from(denom.clone())).to_integer())
                    .collect();
                if self.norm(&v).is_positive() {
                    return Some(v);
                }
            }
        }
        None
    }
}

/// Rows of a congruence transform P with P G P^T diagonal, paired with the
/// diagonal values.
fn diagonalizing_transform(g: &QMat) -> Vec<(Vec<Rat>, Rat)> {
    let n = g.rows;
    let mut a = g.clone();
    let mut p = QMat::identity(n);
    for k in 0..n {
        if a.at(k, k).is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a.at(i, i).is_zero()) {
                qmat_sym_swap(&mut a, &mut p, k, i);
            } else if let Some(j) = (k..n).find(|&j| j != k && !a.at(k, j).is_zero()) {
                qmat_sym_add(&mut a, &mut p, k, j, &Rat::one());
            } else if let Some((i, j)) = qmat_find_offdiag(&a, k) {
                qmat_sym_add(&mut a, &mut p, i, j, &Rat::one());
                if i != k {
                    qmat_sym_swap(&mut a, &mut p, k, i);
                }
            } else {
                break;
            }
        }
        if a.at(k, k).is_zero() {
            continue;
        }
        let piv = a.at(k, k).clone();
        for i in k + 1..n {
            if !a.at(i, k).is_zero() {
                let f = -(a.at(i, k) / &piv);
                qmat_sym_add(&mut a, &mut p, i, k, &f);
            }
        }
    }
    (0..n)
        .map(|i| {
            let row: Vec<Rat> = (0..n).map(|j| p.at(i, j).clone()).collect();
            (row, a.at(i, i).clone())
        })
        .collect()
}

fn qmat_find_offdiag(a: &QMat, k: usize) -> Option<(usize, usize)> {
    for i in k..a.rows {
        for j in i + 1..a.cols {
            if !a.at(i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

fn qmat_sym_swap(a: &mut QMat, p: &mut QMat, i: usize, j: usize) {
    let n = a.rows;
    for c in 0..n {
        let x = a.at(i, c).clone();
        let y = a.at(j, c).clone();
        *a.at_mut(i, c) = y;
        *a.at_mut(j, c) = x;
        let x = p.at(i, c).clone();
        let y = p.at(j, c).clone();
        *p.at_mut(i, c) = y;
        *p.at_mut(j, c) = x;
    }
    for r in 0..n {
        let x = a.at(r, i).clone();
        let y = a.at(r, j).clone();
        *a.at_mut(r, i) = y;
        *a.at_mut(r, j) = x;
    }
}

fn qmat_sym_add(a: &mut QMat, p: &mut QMat, i: usize, j: usize, f: &Rat) {
    let n = a.rows;
    for c in 0..n {
        let t = f * a.at(j, c);
        *a.at_mut(i, c) += t;
        let t = f * p.at(j, c);
        *p.at_mut(i, c) += t;
    }
    for r in 0..n {
        let t = f * a.at(r, j);
        *a.at_mut(r, i) += t;
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The rank-2 even unimodular hyperbolic lattice.
pub fn hyperbolic_plane() -> Lattice {
    Lattice::new(IMat::from_rows_i64(&[&[0, 1], &[1, 0]]))
        .unwrap()
        .with_label("U")
}

/// Negative definite root lattice A_k.
pub fn root_a(k: usize) -> Lattice {
    assert!(k >= 1);
    Lattice::new(IMat::from_fn(k, k, |i, j| {
        if i == j {
            Int::from(-2)
        } else if i.abs_diff(j) == 1 {
            Int::one()
        } else {
            Int::zero()
        }
    }))
    .unwrap()
    .with_label(format!("A{}", k))
}

/// Negative definite root lattice D_l (l >= 4): a path on the first l-1
/// nodes with the last node attached to node l-2.
pub fn root_d(l: usize) -> Lattice {
    assert!(l >= 4);
    Lattice::new(IMat::from_fn(l, l, |i, j| {
        if i == j {
            Int::from(-2)
        } else if (i < l - 1 && j < l - 1 && i.abs_diff(j) == 1)
            || (i == l - 1 && j == l - 3)
            || (j == l - 1 && i == l - 3)
        {
            Int::one()
        } else {
            Int::zero()
        }
    }))
    .unwrap()
    .with_label(format!("D{}", l))
}

/// Negative definite root lattice E_m (m = 6, 7, 8), Bourbaki numbering:
/// chain 1-3-4-5-..., node 2 attached to node 4.
pub fn root_e(m: usize) -> Lattice {
    assert!((6..=8).contains(&m));
    let adj = |i: usize, j: usize| -> bool {
        let (a, b) = (i + 1, j + 1); // 1-based Bourbaki labels
        let edge = |x: usize, y: usize| (a == x && b == y) || (a == y && b == x);
        edge(1, 3)
            || edge(3, 4)
            || edge(2, 4)
            || edge(4, 5)
            || edge(5, 6)
            || (m >= 7 && edge(6, 7))
            || (m >= 8 && edge(7, 8))
    };
    Lattice::new(IMat::from_fn(m, m, |i, j| {
        if i == j {
            Int::from(-2)
        } else if adj(i, j) {
            Int::one()
        } else {
            Int::zero()
        }
    }))
    .unwrap()
    .with_label(format!("E{}", m))
}

/// U + E8, the even unimodular hyperbolic lattice of rank 10.
pub fn e10() -> Lattice {
    hyperbolic_plane().direct_sum(&root_e(8)).with_label("E10")
}

/// Odd unimodular lattice I_{r,s} = diag(1,...,1,-1,...,-1).
pub fn odd_unimodular(r: usize, s: usize) -> Lattice {
    Lattice::new(IMat::from_fn(r + s, r + s, |i, j| {
        if i != j {
            Int::zero()
        } else if i < r {
            Int::one()
        } else {
            Int::from(-1)
        }
    }))
    .unwrap()
    .with_label(format!("I{},{}", r, s))
}

/// Even unimodular lattice II_{r,s}; requires r = s mod 8.
pub fn even_unimodular(r: usize, s: usize) -> Result<Lattice, LatticeError> {
    if r % 8 != s % 8 {
        return Err(LatticeError::BadUnimodularSignature { r, s });
    }
    let planes = r.min(s);
    let mut acc: Option<Lattice> = None;
    for _ in 0..planes {
        acc = Some(match acc {
            None => hyperbolic_plane(),
            Some(l) => l.direct_sum(&hyperbolic_plane()),
        });
    }
    let copies = (r.max(s) - planes) / 8;
    for _ in 0..copies {
        let e8 = if s > r {
            root_e(8)
        } else {
            // positive definite variant
            Lattice::new(root_e(8).gram().neg()).unwrap()
        };
        acc = Some(match acc {
            None => e8,
            Some(l) => l.direct_sum(&e8),
        });
    }
    Ok(acc
        .unwrap_or(Lattice {
            gram: IMat::zero(0, 0),
            label: None,
        })
        .with_label(format!("II{},{}", r, s)))
}

/// Parse a lattice name: U, A<k>, D<l>, E6..E8, E10, I<r>,<s>, II<r>,<s>,
/// optionally followed by an integer rescale "(n)".
pub fn named(name: &str) -> Result<Lattice, LatticeError> {
    let name = name.trim();
    let (base, scale) = match name.find('(') {
        Some(i) if name.ends_with(')') => {
            let inner = &name[i + 1..name.len() - 1];
            let s: i64 = inner
                .parse()
                .map_err(|_| LatticeError::UnknownName(name.into()))?;
            (&name[..i], s)
        }
        _ => (name, 1),
    };
    if scale == 0 {
        return Err(LatticeError::UnknownName(name.into()));
    }
    let lattice = parse_base(base)?;
    if scale == 1 {
        Ok(lattice)
    } else {
        let scaled = lattice.rescale(&Rat::from(Int::from(scale)))?;
        Ok(scaled.with_label(format!("{}({})", base, scale)))
    }
}

fn parse_base(base: &str) -> Result<Lattice, LatticeError> {
    let err = || LatticeError::UnknownName(base.into());
    if base == "U" {
        return Ok(hyperbolic_plane());
    }
    if let Some(rest) = base.strip_prefix("II") {
        let (r, s) = parse_pair(rest).ok_or_else(err)?;
        return even_unimodular(r, s);
    }
    if let Some(rest) = base.strip_prefix('I') {
        let (r, s) = parse_pair(rest).ok_or_else(err)?;
        return Ok(odd_unimodular(r, s));
    }
    if let Some(rest) = base.strip_prefix('A') {
        let k: usize = rest.parse().map_err(|_| err())?;
        if k >= 1 {
            return Ok(root_a(k));
        }
        return Err(err());
    }
    if let Some(rest) = base.strip_prefix('D') {
        let l: usize = rest.parse().map_err(|_| err())?;
        if l >= 4 {
            return Ok(root_d(l));
        }
        return Err(err());
    }
    if let Some(rest) = base.strip_prefix('E') {
        let m: usize = rest.parse().map_err(|_| err())?;
        return match m {
            6..=8 => Ok(root_e(m)),
            10 => Ok(e10()),
            _ => Err(err()),
        };
    }
    Err(err())
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn named_invariants() {
        let u = named("U").unwrap();
        assert_eq!(u.signature(), (1, 1, 0));
        assert!(u.is_even() && u.is_unimodular());

        let e8 = named("E8").unwrap();
        assert_eq!(e8.signature(), (0, 8, 0));
        assert!(e8.is_even());
        assert_eq!(e8.det(), Int::one());

        let e10 = named("E10").unwrap();
        assert_eq!(e10.signature(), (1, 9, 0));
        assert!(e10.is_even() && e10.is_unimodular());

        let a6 = named("A6").unwrap();
        assert_eq!(a6.det().abs(), Int::from(7));

        let d4 = named("D4").unwrap();
        assert_eq!(d4.det().abs(), Int::from(4));

        let i224 = named("I2,2(4)").unwrap();
        assert_eq!(i224.signature(), (2, 2, 0));
        assert!(i224.is_even());
        assert_eq!(i224.det().abs(), Int::from(256));

        let ii319 = named("II3,19").unwrap();
        assert_eq!(ii319.signature(), (3, 19, 0));
        assert!(ii319.is_even() && ii319.is_unimodular());

        let ii91 = named("II9,1").unwrap();
        assert_eq!(ii91.signature(), (9, 1, 0));
        assert!(ii91.is_even() && ii91.is_unimodular());

        assert!(named("II2,1").is_err());
        assert!(named("Q5").is_err());
    }

    #[test]
    fn rescale_roundtrip_and_halving() {
        let e8 = named("E8").unwrap();
        let e82 = e8.rescale(&rat(2, 1)).unwrap();
        assert_eq!(e82.det().abs(), Int::from(256));
        let back = e82.rescale(&rat(1, 2)).unwrap();
        assert_eq!(back.gram(), e8.gram());
        assert!(back.is_even() && back.is_unimodular());

        // A1 = <-2> has glue Z/2 but length 1 = rank, q(g) = -1/2: p = 2
        // halving must fail on the self-pairing condition
        let a1 = named("A1").unwrap();
        assert!(matches!(
            a1.rescale(&rat(1, 2)),
            Err(LatticeError::HalvingHypothesis { p: 2, .. })
        ));

        // A6(2) halves to A6
        let a62 = named("A6(2)").unwrap();
        let a6 = a62.rescale(&rat(1, 2)).unwrap();
        assert!(a6.is_even());
        assert_eq!(a6.det().abs(), Int::from(7));
    }

    #[test]
    fn classify_even_unimodular_cases() {
        assert_eq!(named("E10").unwrap().classify_even_unimodular(), Some((1, 9)));
        assert_eq!(named("E8").unwrap().classify_even_unimodular(), Some((0, 8)));
        assert_eq!(named("E8(2)").unwrap().classify_even_unimodular(), None);
        assert_eq!(named("I1,1").unwrap().classify_even_unimodular(), None);
    }

    #[test]
    fn positive_norm_vector_exists() {
        let l = named("U").unwrap().direct_sum(&named("A2").unwrap());
        let v = l.positive_norm_vector().unwrap();
        assert!(l.norm(&v).is_positive());
    }
}
