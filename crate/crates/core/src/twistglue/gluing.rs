//! Equivariant anti-isometric gluing of lattices along subgroups of their
//! glue groups, and the overlattice construction it defines.
//!
//! Subgroup enumeration and map search run inside the p-torsion layer of the
//! glue groups (all the gluings this crate needs are along elementary
//! abelian subgroups), with small F_p linear algebra and exact rational
//! form values.

use super::TwistGlueError;
use crate::budget::Budget;
use crate::exactalg::{IMat, Int, QMat, Rat};
use crate::isomgroup::{check_isometry, GlueAction, Isometry};
use crate::lattice::glue::{normalize_mod, normalize_mod1};
use crate::lattice::{DiscriminantForm, Lattice};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Explicit subgroup: generators in Smith coordinates of the host glue group.
#[derive(Debug, Clone)]
pub struct SubgroupSpec {
    pub gens: Vec<Vec<i64>>,
}

/// Invariant filter applied to each glued lattice before it is reported.
#[derive(Debug, Clone)]
pub enum TargetFilter {
    /// classify as the even unimodular lattice of this signature
    EvenUnimodular { pos: usize, neg: usize },
    /// even with 2-elementary glue of given length and parity flag
    TwoElementary {
        pos: usize,
        neg: usize,
        length: usize,
        delta: u8,
    },
    /// plain invariants
    Invariants {
        even: bool,
        pos: usize,
        neg: usize,
        det_abs: Int,
    },
}

impl TargetFilter {
    pub fn admits(&self, l: &Lattice) -> Result<bool, TwistGlueError> {
        match self {
            TargetFilter::EvenUnimodular { pos, neg } => {
                Ok(l.classify_even_unimodular() == Some((*pos, *neg)))
            }
            TargetFilter::TwoElementary {
                pos,
                neg,
                length,
                delta,
            } => {
                let (p, n, z) = l.signature();
                if z != 0 || p != *pos || n != *neg || !l.is_even() {
                    return Ok(false);
                }
                Ok(l.two_elementary_profile()? == Some((*length, *delta)))
            }
            TargetFilter::Invariants {
                even,
                pos,
                neg,
                det_abs,
            } => {
                let (p, n, z) = l.signature();
                Ok(z == 0
                    && p == *pos
                    && n == *neg
                    && l.is_even() == *even
                    && &l.det().abs() == det_abs)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GlueOptions {
    /// order of the glued subgroups (must be a prime power p^k); ignored
    /// when explicit subgroups are given
    pub subgroup_order: Option<i64>,
    /// explicit subgroup generators on both sides
    pub explicit: Option<(SubgroupSpec, SubgroupSpec)>,
    /// glue along the full glue groups (they must be elementary abelian)
    pub full_groups: bool,
    /// require q(phi x) = -q(x), so even lattices glue to an even lattice
    pub require_even_glue: bool,
    /// require phi to intertwine the induced glue actions
    pub equivariant: bool,
    pub target: Option<TargetFilter>,
    pub max_maps: usize,
}

impl Default for GlueOptions {
    fn default() -> Self {
        GlueOptions {
            subgroup_order: None,
            explicit: None,
            full_groups: false,
            require_even_glue: true,
            equivariant: true,
            target: None,
            max_maps: 10_000,
        }
    }
}

/// A gluing map between elementary abelian subgroups, recorded by an
/// independent basis of the source and its images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingMap {
    pub prime: i64,
    pub h1_basis: Vec<Vec<i64>>,
    pub h2_images: Vec<Vec<i64>>,
}

/// A gluing map together with the overlattice it produces.
#[derive(Debug, Clone)]
pub struct GluedResult {
    pub map: GluingMap,
    pub lattice: Lattice,
    pub isometry: Option<Isometry>,
    /// rows: images of the standard bases of L1 (then L2) in glued coords
    pub embed1: IMat,
    pub embed2: IMat,
}

/// One side of a gluing search: the p-torsion layer of a glue group with
/// its action and form data.
struct TorsionSide {
    p: i64,
    dim: usize,
    /// Smith-coordinate representatives of the torsion basis
    basis_smith: Vec<Vec<i64>>,
    /// action of the isometry on torsion coordinates (column j = image of j)
    act: Vec<Vec<i64>>,
    /// b values on torsion basis pairs (mod 1)
    b_mat: Vec<Vec<Rat>>,
    /// q values on torsion basis (mod 2)
    q_vec: Vec<Rat>,
    disc: DiscriminantForm,
}

impl TorsionSide {
    fn build(
        l: &Lattice,
        f: Option<&Isometry>,
        p: i64,
        budget: &Budget,
    ) -> Result<TorsionSide, TwistGlueError> {
        budget.charge(1)?;
        let group = l.glue_group()?;
        let disc = DiscriminantForm::of(group.clone());
        let mut basis_smith: Vec<Vec<i64>> = vec![];
        for (i, &d) in group.orders().iter().enumerate() {
            if d % p == 0 {
                let mut v = vec![0i64; group.orders().len()];
                v[i] = d / p;
                basis_smith.push(v);
            }
        }
        let dim = basis_smith.len();
        let act = match f {
            Some(f) => {
                let action = GlueAction::of(f)?;
                let mut cols = vec![];
                for bs in &basis_smith {
                    let img = action.apply(bs);
                    cols.push(smith_to_torsion(&group, &basis_smith, &img, p).ok_or_else(
                        || TwistGlueError::BadSubgroup("action does not preserve torsion".into()),
                    )?);
                }
                cols
            }
            None => (0..dim)
                .map(|j| (0..dim).map(|r| i64::from(r == j)).collect())
                .collect(),
        };
        let mut b_mat = vec![vec![Rat::zero(); dim]; dim];
        let mut q_vec = vec![Rat::zero(); dim];
        for i in 0..dim {
            q_vec[i] = disc.q(&basis_smith[i]);
            for j in 0..dim {
                b_mat[i][j] = disc.b(&basis_smith[i], &basis_smith[j]);
            }
        }
        Ok(TorsionSide {
            p,
            dim,
            basis_smith,
            act,
            b_mat,
            q_vec,
            disc,
        })
    }

    fn apply_act(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        for (j, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for r in 0..self.dim {
                out[r] = (out[r] + self.act[j][r] * c).rem_euclid(self.p);
            }
        }
        out
    }

    fn b(&self, x: &[i64], y: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j] == 0 {
                    continue;
                }
                acc += &self.b_mat[i][j] * Rat::from(Int::from(x[i] * y[j]));
            }
        }
        normalize_mod1(&acc)
    }

    fn q(&self, x: &[i64]) -> Rat {
        let mut acc = Rat::zero();
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            acc += &self.q_vec[i] * Rat::from(Int::from(x[i] * x[i]));
            for j in i + 1..self.dim {
                if x[j] == 0 {
                    continue;
                }
                acc += &self.b_mat[i][j] * Rat::from(Int::from(2 * x[i] * x[j]));
            }
        }
        normalize_mod(&acc, 2)
    }

    fn torsion_to_smith(&self, v: &[i64]) -> Vec<i64> {
        let k = self.basis_smith.first().map(|b| b.len()).unwrap_or(0);
        let mut out = vec![0i64; k];
        for (i, &c) in v.iter().enumerate() {
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.basis_smith[i][r] * c;
            }
        }
        // reduce mod orders
        let orders = self.disc.group().orders();
        for (r, o) in out.iter_mut().enumerate() {
            *o = o.rem_euclid(orders[r]);
        }
        out
    }
}

/// Express a p-torsion element (Smith coords) in the torsion basis, if it
/// really is p-torsion.
fn smith_to_torsion(
    group: &crate::lattice::GlueGroup,
    basis_smith: &[Vec<i64>],
    v: &[i64],
    p: i64,
) -> Option<Vec<i64>> {
    let orders = group.orders();
    let mut coords = vec![];
    let mut k = 0;
    for (i, &d) in orders.iter().enumerate() {
        let vi = v[i].rem_euclid(d);
        if d % p == 0 {
            let step = d / p;
            if vi % step != 0 {
                return None;
            }
            coords.push((vi / step).rem_euclid(p));
            k += 1;
        } else if vi != 0 {
            return None;
        }
    }
    debug_assert_eq!(k, basis_smith.len());
    Some(coords)
}

/// Reduced row echelon form over F_p; canonical for subspace identity.
fn rref_mod_p(rows: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(sel) = (pivot_row..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, sel);
        let inv = mod_inv(m[pivot_row][col], p);
        for x in m[pivot_row].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..m.len() {
            if i != pivot_row && m[i][col] != 0 {
                let f = m[i][col];
                for c in 0..cols {
                    m[i][c] = (m[i][c] - f * m[pivot_row][c]).rem_euclid(p);
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.retain(|r| r.iter().any(|&x| x != 0));
    m.sort();
    m
}

fn mod_inv(a: i64, p: i64) -> i64 {
    let mut t = (0i64, 1i64);
    let mut r = (p, a.rem_euclid(p));
    while r.1 != 0 {
        let q = r.0 / r.1;
        t = (t.1, t.0 - q * t.1);
        r = (r.1, r.0 - q * r.1);
    }
    t.0.rem_euclid(p)
}

/// All subspaces of the torsion layer stable under the action, as canonical
/// RREF bases, via closure BFS. Dimension-filtered by the caller.
fn stable_subspaces(
    side: &TorsionSide,
    budget: &Budget,
) -> Result<Vec<Vec<Vec<i64>>>, TwistGlueError> {
    use std::collections::HashSet;
    let p = side.p;
    let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
    let zero: Vec<Vec<i64>> = vec![];
    seen.insert(zero.clone());
    let mut queue = vec![zero];
    let mut out = vec![];
    while let Some(basis) = queue.pop() {
        budget.charge(1)?;
        out.push(basis.clone());
        // extend by each vector not in the span
        for v in enumerate_f_p_vectors(side.dim, p) {
            if v.iter().all(|&x| x == 0) || in_span(&basis, &v, p) {
                continue;
            }
            let mut rows = basis.clone();
            rows.push(v.clone());
            // close under the action
            loop {
                let r = rref_mod_p(&rows, p);
                let mut extended = r.clone();
                let mut grew = false;
                for row in &r {
                    let img = side.apply_act(row);
                    if !in_span(&r, &img, p) {
                        extended.push(img);
                        grew = true;
                    }
                }
                rows = extended;
                if !grew {
                    break;
                }
            }
            let canon = rref_mod_p(&rows, p);
            if seen.insert(canon.clone()) {
                queue.push(canon);
            }
        }
    }
    Ok(out)
}

fn enumerate_f_p_vectors(dim: usize, p: i64) -> Vec<Vec<i64>> {
    let mut out = vec![];
    let total = (p as u64).checked_pow(dim as u32).expect("small space");
    for code in 0..total {
        let mut v = vec![0i64; dim];
        let mut c = code;
        for x in v.iter_mut() {
            *x = (c % p as u64) as i64;
            c /= p as u64;
        }
        out.push(v);
    }
    out
}

fn in_span(basis: &[Vec<i64>], v: &[i64], p: i64) -> bool {
    // reduce v against an RREF basis
    let mut v: Vec<i64> = v.iter().map(|&x| x.rem_euclid(p)).collect();
    for row in basis {
        let Some(lead) = row.iter().position(|&x| x != 0) else {
            continue;
        };
        if v[lead] != 0 {
            let f = (v[lead] * mod_inv(row[lead], p)).rem_euclid(p);
            for (i, x) in v.iter_mut().enumerate() {
                *x = (*x - f * row[i]).rem_euclid(p);
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

fn span_elements(basis: &[Vec<i64>], p: i64) -> Vec<Vec<i64>> {
    let dim = basis.len();
    let n = basis.first().map(|b| b.len()).unwrap_or(0);
    let mut out = vec![];
    let total = (p as u64).pow(dim as u32);
    for code in 0..total {
        let mut v = vec![0i64; n];
        let mut c = code;
        for row in basis {
            let coef = (c % p as u64) as i64;
            c /= p as u64;
            if coef != 0 {
                for (i, x) in v.iter_mut().enumerate() {
                    *x = (*x + coef * row[i]).rem_euclid(p);
                }
            }
        }
        out.push(v);
    }
    out
}

/// Partial linear map with consistency tracking: echelon rows of the source
/// paired with images.
#[derive(Clone)]
struct PartialMap {
    p: i64,
    rows: Vec<(Vec<i64>, Vec<i64>)>,
}

impl PartialMap {
    fn new(p: i64) -> Self {
        PartialMap { p, rows: vec![] }
    }

    /// Add the requirement v -> w; false on inconsistency.
    fn add(&mut self, v: &[i64], w: &[i64]) -> bool {
        let p = self.p;
        let mut v: Vec<i64> = v.iter().map(|&x| x.rem_euclid(p)).collect();
        let mut w: Vec<i64> = w.iter().map(|&x| x.rem_euclid(p)).collect();
        for (rv, rw) in &self.rows {
            let Some(lead) = rv.iter().position(|&x| x != 0) else {
                continue;
            };
            if v[lead] != 0 {
                let f = (v[lead] * mod_inv(rv[lead], p)).rem_euclid(p);
                for i in 0..v.len() {
                    v[i] = (v[i] - f * rv[i]).rem_euclid(p);
                }
                for i in 0..w.len() {
                    w[i] = (w[i] - f * rw[i]).rem_euclid(p);
                }
            }
        }
        if v.iter().all(|&x| x == 0) {
            return w.iter().all(|&x| x == 0);
        }
        // normalize leading coefficient
        let lead = v.iter().position(|&x| x != 0).unwrap();
        let inv = mod_inv(v[lead], p);
        for x in v.iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for x in w.iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        self.rows.push((v, w));
        true
    }

    fn source_dim(&self) -> usize {
        self.rows.len()
    }

    fn image_rank(&self) -> usize {
        let imgs: Vec<Vec<i64>> = self.rows.iter().map(|(_, w)| w.clone()).collect();
        rref_mod_p(&imgs, self.p).len()
    }
}

/// Check anti-compatibility of the partial map on all row pairs.
fn forms_anti_ok(
    m: &PartialMap,
    s1: &TorsionSide,
    s2: &TorsionSide,
    require_even: bool,
) -> bool {
    for (i, (v1, w1)) in m.rows.iter().enumerate() {
        if require_even {
            let qs = s1.q(v1);
            let qt = s2.q(w1);
            if normalize_mod(&(qs + qt), 2) != Rat::zero() {
                return false;
            }
        } else {
            let bs = s1.b(v1, v1);
            let bt = s2.b(w1, w1);
            if normalize_mod1(&(bs + bt)) != Rat::zero() {
                return false;
            }
        }
        for (v2, w2) in m.rows.iter().take(i) {
            let bs = s1.b(v1, v2);
            let bt = s2.b(w1, w2);
            if normalize_mod1(&(bs + bt)) != Rat::zero() {
                return false;
            }
        }
    }
    true
}

/// Module generators of a subspace under the side action (greedy maximal
/// orbit spans).
fn module_generators(side: &TorsionSide, h_basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let p = side.p;
    let elements = span_elements(h_basis, p);
    let mut covered: Vec<Vec<i64>> = vec![];
    let mut gens = vec![];
    let target_dim = h_basis.len();
    while rref_mod_p(&covered, p).len() < target_dim {
        let mut best: Option<(usize, Vec<i64>)> = None;
        for v in &elements {
            if v.iter().all(|&x| x == 0) || in_span(&rref_mod_p(&covered, p), v, p) {
                continue;
            }
            let mut rows = covered.clone();
            let mut cur = v.clone();
            for _ in 0..=target_dim {
                rows.push(cur.clone());
                cur = side.apply_act(&cur);
            }
            let d = rref_mod_p(&rows, p).len();
            if best.as_ref().map(|(bd, _)| d > *bd).unwrap_or(true) {
                best = Some((d, v.clone()));
            }
        }
        let (_, v) = best.expect("subspace not yet covered");
        let mut cur = v.clone();
        for _ in 0..=target_dim {
            covered.push(cur.clone());
            cur = side.apply_act(&cur);
        }
        gens.push(v);
    }
    gens
}

/// Enumerate gluing maps between (subgroups of) the glue groups of two
/// lattices, subject to the options. Isometries, when given, must stabilize
/// the subgroups and are intertwined by every returned map.
pub fn enumerate_gluings(
    l1: &Lattice,
    f1: Option<&Isometry>,
    l2: &Lattice,
    f2: Option<&Isometry>,
    opts: &GlueOptions,
    budget: &Budget,
) -> Result<Vec<GluedResult>, TwistGlueError> {
    // trivial glue groups: the single empty gluing
    let g1 = l1.glue_group()?;
    let g2 = l2.glue_group()?;
    if (g1.is_trivial() || g2.is_trivial())
        && opts.explicit.is_none()
        && opts.subgroup_order.unwrap_or(1) == 1
    {
        let map = GluingMap {
            prime: 2,
            h1_basis: vec![],
            h2_images: vec![],
        };
        let glued = glue(l1, l2, &map, f1, f2)?;
        let keep = match &opts.target {
            Some(t) => t.admits(&glued.lattice)?,
            None => true,
        };
        return Ok(if keep { vec![glued] } else { vec![] });
    }

    let p = infer_prime(opts, &g1)?;
    let side1 = TorsionSide::build(l1, if opts.equivariant { f1 } else { None }, p, budget)?;
    let side2 = TorsionSide::build(l2, if opts.equivariant { f2 } else { None }, p, budget)?;

    // candidate subgroup bases on both sides
    let (cands1, cands2): (Vec<Vec<Vec<i64>>>, Vec<Vec<Vec<i64>>>) = match (&opts.explicit, opts.full_groups) {
        (Some((s1, s2)), _) => {
            let b1 = spec_to_torsion_basis(&side1, &g1, s1, p)?;
            let b2 = spec_to_torsion_basis(&side2, &g2, s2, p)?;
            (vec![b1], vec![b2])
        }
        (None, true) => {
            if g1.orders().iter().any(|&d| d != p) || g2.orders().iter().any(|&d| d != p) {
                return Err(TwistGlueError::UnsupportedSubgroup);
            }
            let full1: Vec<Vec<i64>> = (0..side1.dim)
                .map(|i| (0..side1.dim).map(|j| i64::from(i == j)).collect())
                .collect();
            let full2: Vec<Vec<i64>> = (0..side2.dim)
                .map(|i| (0..side2.dim).map(|j| i64::from(i == j)).collect())
                .collect();
            (vec![full1], vec![full2])
        }
        (None, false) => {
            let order = opts
                .subgroup_order
                .ok_or_else(|| TwistGlueError::BadSubgroup("subgroup order required".into()))?;
            let k = prime_power_exponent(order, p)
                .ok_or_else(|| TwistGlueError::BadSubgroup("order must be a power of p".into()))?;
            let all1 = stable_subspaces(&side1, budget)?;
            let all2 = stable_subspaces(&side2, budget)?;
            (
                all1.into_iter().filter(|b| b.len() == k).collect(),
                all2.into_iter().filter(|b| b.len() == k).collect(),
            )
        }
    };

    let mut out = vec![];
    for h1 in &cands1 {
        for h2 in &cands2 {
            if h1.len() != h2.len() {
                continue;
            }
            enumerate_maps_between(
                l1, f1, l2, f2, &side1, &side2, h1, h2, opts, budget, &mut out,
            )?;
            if out.len() >= opts.max_maps {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn infer_prime(
    opts: &GlueOptions,
    g1: &crate::lattice::GlueGroup,
) -> Result<i64, TwistGlueError> {
    if let Some((s1, _)) = &opts.explicit {
        // prime = order of the first generator (must be prime)
        let gen = s1
            .gens
            .first()
            .ok_or_else(|| TwistGlueError::BadSubgroup("empty subgroup spec".into()))?;
        let o = g1.element_order(gen);
        if !crate::lattice::is_prime_u64(o as u64) {
            return Err(TwistGlueError::UnsupportedSubgroup);
        }
        return Ok(o);
    }
    if opts.full_groups {
        let d = *g1
            .orders()
            .first()
            .ok_or_else(|| TwistGlueError::BadSubgroup("trivial group".into()))?;
        if !crate::lattice::is_prime_u64(d as u64) {
            return Err(TwistGlueError::UnsupportedSubgroup);
        }
        return Ok(d);
    }
    let order = opts
        .subgroup_order
        .ok_or_else(|| TwistGlueError::BadSubgroup("subgroup order required".into()))?;
    for p in [2i64, 3, 5, 7, 11, 13] {
        if prime_power_exponent(order, p).is_some() {
            return Ok(p);
        }
    }
    Err(TwistGlueError::BadSubgroup(format!(
        "order {} is not a small prime power",
        order
    )))
}

fn prime_power_exponent(order: i64, p: i64) -> Option<usize> {
    let mut o = order;
    let mut k = 0;
    while o % p == 0 {
        o /= p;
        k += 1;
    }
    if o == 1 && k > 0 {
        Some(k)
    } else {
        None
    }
}

fn spec_to_torsion_basis(
    side: &TorsionSide,
    group: &crate::lattice::GlueGroup,
    spec: &SubgroupSpec,
    p: i64,
) -> Result<Vec<Vec<i64>>, TwistGlueError> {
    let mut rows = vec![];
    for g in &spec.gens {
        let o = group.element_order(g);
        if o == 1 {
            continue;
        }
        if o != p {
            return Err(TwistGlueError::BadSubgroup(format!(
                "generator of order {} in a p = {} gluing",
                o, p
            )));
        }
        let t = smith_to_torsion(group, &side.basis_smith, &group.reduce(g), p)
            .ok_or_else(|| TwistGlueError::BadSubgroup("generator is not p-torsion".into()))?;
        rows.push(t);
    }
    let b = rref_mod_p(&rows, p);
    if b.len() != rows.len() {
        return Err(TwistGlueError::BadSubgroup(
            "generators are not independent".into(),
        ));
    }
    Ok(b)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_maps_between(
    l1: &Lattice,
    f1: Option<&Isometry>,
    l2: &Lattice,
    f2: Option<&Isometry>,
    side1: &TorsionSide,
    side2: &TorsionSide,
    h1: &[Vec<i64>],
    h2: &[Vec<i64>],
    opts: &GlueOptions,
    budget: &Budget,
    out: &mut Vec<GluedResult>,
) -> Result<(), TwistGlueError> {
    let p = side1.p;
    let dim = h1.len();
    if dim == 0 {
        let map = GluingMap {
            prime: p,
            h1_basis: vec![],
            h2_images: vec![],
        };
        if let Some(res) = try_glue(l1, l2, &map, f1, f2, opts)? {
            out.push(res);
        }
        return Ok(());
    }
    let gens = module_generators(side1, h1);
    let h2_elements = span_elements(h2, p);
    // depth-first placement of module generators with t-closure
    struct Frame<'a> {
        side1: &'a TorsionSide,
        side2: &'a TorsionSide,
        gens: &'a [Vec<i64>],
        h2_elements: &'a [Vec<i64>],
        opts: &'a GlueOptions,
        dim: usize,
    }
    #[allow(clippy::too_many_arguments)]
    fn place(
        fr: &Frame,
        level: usize,
        pm: &PartialMap,
        budget: &Budget,
        found: &mut Vec<GluingMap>,
        max: usize,
    ) -> Result<(), TwistGlueError> {
        if found.len() >= max {
            return Ok(());
        }
        if level == fr.gens.len() {
            if pm.source_dim() == fr.dim && pm.image_rank() == fr.dim {
                // record basis pairs
                let mut h1b = vec![];
                let mut h2i = vec![];
                for (v, w) in &pm.rows {
                    h1b.push(fr.side1.torsion_to_smith(v));
                    h2i.push(fr.side2.torsion_to_smith(w));
                }
                found.push(GluingMap {
                    prime: fr.side1.p,
                    h1_basis: h1b,
                    h2_images: h2i,
                });
            }
            return Ok(());
        }
        let g = &fr.gens[level];
        for w in fr.h2_elements {
            budget.charge(1)?;
            if w.iter().all(|&x| x == 0) {
                continue;
            }
            let mut pm2 = pm.clone();
            // close the pair (g, w) under the actions
            let mut src = g.clone();
            let mut img = w.clone();
            let mut ok = true;
            for _ in 0..=fr.dim {
                if !pm2.add(&src, &img) {
                    ok = false;
                    break;
                }
                src = fr.side1.apply_act(&src);
                img = fr.side2.apply_act(&img);
            }
            if !ok {
                continue;
            }
            if pm2.image_rank() != pm2.source_dim() {
                continue;
            }
            if !forms_anti_ok(&pm2, fr.side1, fr.side2, fr.opts.require_even_glue) {
                continue;
            }
            place(fr, level + 1, &pm2, budget, found, max)?;
            if found.len() >= max {
                return Ok(());
            }
        }
        Ok(())
    }
    let frame = Frame {
        side1,
        side2,
        gens: &gens,
        h2_elements: &h2_elements,
        opts,
        dim,
    };
    let mut found = vec![];
    place(
        &frame,
        0,
        &PartialMap::new(p),
        budget,
        &mut found,
        opts.max_maps.saturating_sub(out.len()) * 4 + 64,
    )?;
    for map in found {
        if let Some(res) = try_glue(l1, l2, &map, f1, f2, opts)? {
            out.push(res);
            if out.len() >= opts.max_maps {
                break;
            }
        }
    }
    Ok(())
}

fn try_glue(
    l1: &Lattice,
    l2: &Lattice,
    map: &GluingMap,
    f1: Option<&Isometry>,
    f2: Option<&Isometry>,
    opts: &GlueOptions,
) -> Result<Option<GluedResult>, TwistGlueError> {
    let glued = match glue(l1, l2, map, f1, f2) {
        Ok(g) => g,
        Err(TwistGlueError::InvalidGluing(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if let Some(t) = &opts.target {
        if !t.admits(&glued.lattice)? {
            return Ok(None);
        }
    }
    Ok(Some(glued))
}

/// Build the glued overlattice L1 +_phi L2 and, when isometries are given,
/// the extended isometry. Errors with InvalidGluing when the data does not
/// define an even integral overlattice or the isometry does not extend.
pub fn glue(
    l1: &Lattice,
    l2: &Lattice,
    map: &GluingMap,
    f1: Option<&Isometry>,
    f2: Option<&Isometry>,
) -> Result<GluedResult, TwistGlueError> {
    let n1 = l1.rank();
    let n2 = l2.rank();
    let n = n1 + n2;
    let g1 = l1.glue_group()?;
    let g2 = l2.glue_group()?;
    // graph generators as rational vectors
    let mut graph_rows: Vec<Vec<Rat>> = vec![];
    for (a, b) in map.h1_basis.iter().zip(map.h2_images.iter()) {
        let ra = g1.rep_of(a);
        let rb = g2.rep_of(b);
        let mut row = Vec::with_capacity(n);
        row.extend(ra);
        row.extend(rb);
        graph_rows.push(row);
    }
    // common denominator
    let mut denom = Int::one();
    for row in &graph_rows {
        for x in row {
            denom = denom.lcm(x.denom());
        }
    }
    let mut rows: Vec<Vec<Int>> = vec![];
    for i in 0..n {
        let mut r = vec![Int::zero(); n];
        r[i] = denom.clone();
        rows.push(r);
    }
    for row in &graph_rows {
        rows.push(
            row.iter()
                .map(|x| (x * Rat::from(denom.clone())).to_integer())
                .collect(),
        );
    }
    let mat = IMat::from_fn(rows.len(), n, |i, j| rows[i][j].clone());
    let (h, rank) = mat.hermite_rows();
    if rank != n {
        return Err(TwistGlueError::InvalidGluing("rank".into()));
    }
    let big_gram = {
        let d = l1.direct_sum(l2);
        h.mul(d.gram()).mul(&h.transpose())
    };
    let d2 = &denom * &denom;
    let mut gram = IMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = big_gram.at(i, j);
            let (q, r) = x.div_rem(&d2);
            if !r.is_zero() {
                return Err(TwistGlueError::InvalidGluing("integrality".into()));
            }
            *gram.at_mut(i, j) = q;
        }
    }
    let lattice = Lattice::new(gram)?;
    // determinant law |det1 det2| = |det| * |H|^2
    let h_order = (map.prime as u64).pow(map.h1_basis.len() as u32);
    let expected = (l1.det() * l2.det()).abs();
    let got = lattice.det().abs() * Int::from(h_order * h_order);
    if expected != got {
        return Err(TwistGlueError::InvalidGluing("determinant law".into()));
    }
    // basis matrix B/denom, new coords y with old = (B/D)^T y
    let bt_inv = {
        let q = QMat::from_fn(n, n, |i, j| {
            Rat::new(h.at(j, i).clone(), denom.clone())
        });
        q.inverse().map_err(|_| TwistGlueError::InvalidGluing("basis".into()))?
    };
    let embed = |offset: usize, count: usize| -> Result<IMat, TwistGlueError> {
        let mut rows = vec![];
        for i in 0..count {
            let mut e = vec![Rat::zero(); n];
            e[offset + i] = Rat::one();
            let y = bt_inv.mul_vec(&e);
            if y.iter().any(|x| !x.is_integer()) {
                return Err(TwistGlueError::InvalidGluing("embedding".into()));
            }
            rows.push(y.into_iter().map(|x| x.to_integer()).collect::<Vec<_>>());
        }
        Ok(IMat::from_fn(count, n, |i, j| rows[i][j].clone()))
    };
    let embed1 = embed(0, n1)?;
    let embed2 = embed(n1, n2)?;
    let isometry = match (f1, f2) {
        (Some(a), Some(b)) => {
            let block = block_diag(a.matrix(), b.matrix());
            // y -> (B/D)^{-T} F (B/D)^T y
            let bt = QMat::from_fn(n, n, |i, j| Rat::new(h.at(j, i).clone(), denom.clone()));
            let fq = bt_inv.mul(&block.to_qmat()).mul(&bt);
            let fi = fq
                .to_imat()
                .map_err(|_| TwistGlueError::InvalidGluing("isometry does not extend".into()))?;
            Some(
                check_isometry(&lattice, fi)
                    .map_err(|_| TwistGlueError::InvalidGluing("extended map not isometry".into()))?,
            )
        }
        _ => None,
    };
    Ok(GluedResult {
        map: map.clone(),
        lattice,
        isometry,
        embed1,
        embed2,
    })
}

fn block_diag(a: &IMat, b: &IMat) -> IMat {
    let n = a.rows + b.rows;
    IMat::from_fn(n, n, |i, j| {
        if i < a.rows && j < a.rows {
            a.at(i, j).clone()
        } else if i >= a.rows && j >= a.rows {
            b.at(i - a.rows, j - a.rows).clone()
        } else {
            Int::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named;

    #[test]
    fn trivial_glue_is_direct_sum() {
        let budget = Budget::new(1_000_000);
        let u = named("U").unwrap();
        let e8 = named("E8").unwrap();
        let opts = GlueOptions {
            subgroup_order: Some(1),
            ..Default::default()
        };
        let res = enumerate_gluings(&u, None, &e8, None, &opts, &budget).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].lattice.gram(), u.direct_sum(&e8).gram());
    }

    #[test]
    fn glue_a1_pair_to_even_lattice() {
        // <-2> and <2>: glue groups Z/2 with q = -1/2 and +1/2: the sum of
        // the two generators has q = 0 mod 2 and the glue gives an even
        // unimodular rank-2 lattice (the hyperbolic plane)
        let budget = Budget::new(1_000_000);
        let a1 = named("A1").unwrap();
        let a1pos = Lattice::new(IMat::from_rows_i64(&[&[2]])).unwrap();
        let opts = GlueOptions {
            subgroup_order: Some(2),
            equivariant: false,
            target: Some(TargetFilter::EvenUnimodular { pos: 1, neg: 1 }),
            ..Default::default()
        };
        let res = enumerate_gluings(&a1pos, None, &a1, None, &opts, &budget).unwrap();
        assert_eq!(res.len(), 1);
        assert_eq!(res[0].lattice.classify_even_unimodular(), Some((1, 1)));
    }

    #[test]
    fn determinant_law_holds() {
        let budget = Budget::new(10_000_000);
        let d4 = named("D4").unwrap();
        let opts = GlueOptions {
            subgroup_order: Some(2),
            equivariant: false,
            require_even_glue: true,
            ..Default::default()
        };
        let res = enumerate_gluings(&d4, None, &d4, None, &opts, &budget).unwrap();
        assert!(!res.is_empty());
        for r in &res {
            let det_h2 = Int::from(4); // |H| = 2 squared
            assert_eq!(
                (d4.det() * d4.det()).abs(),
                r.lattice.det().abs() * det_h2.clone()
            );
            assert!(r.lattice.is_even());
            // both factors remain primitive
            let s1 = crate::lattice::Sublattice::new(r.lattice.clone(), r.embed1.clone()).unwrap();
            assert!(s1.is_primitive());
        }
    }
}
