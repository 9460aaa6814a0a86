//! Arithmetic in Q[x]/(m(x)) for a monic irreducible modulus, plus linear
//! algebra over such a field (kernels of matrices with field entries).

use super::poly::IntPoly;
use super::realalg::RealAlgebraic;
use super::{Int, Rat};
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Debug)]
pub struct NumberField {
    modulus: IntPoly,
    degree: usize,
}

impl NumberField {
    pub fn new(modulus: IntPoly) -> Arc<Self> {
        assert!(modulus.is_monic() && modulus.degree() >= 1);
        let degree = modulus.degree();
        Arc::new(NumberField { modulus, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &IntPoly {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> NfElem {
        NfElem {
            field: self.clone(),
            coeffs: vec![Rat::zero(); self.degree],
        }
    }

    pub fn one(self: &Arc<Self>) -> NfElem {
        self.from_rat(Rat::one())
    }

    pub fn generator(self: &Arc<Self>) -> NfElem {
        let mut coeffs = vec![Rat::zero(); self.degree];
        if self.degree > 1 {
            coeffs[1] = Rat::one();
        } else {
            // x = -c0 in a degree-1 field
            coeffs[0] = -Rat::from(self.modulus.coeff(0));
        }
        NfElem {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn from_rat(self: &Arc<Self>, q: Rat) -> NfElem {
        let mut coeffs = vec![Rat::zero(); self.degree];
        coeffs[0] = q;
        NfElem {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(self: &Arc<Self>, mut coeffs: Vec<Rat>) -> NfElem {
        if coeffs.len() > self.degree {
            coeffs = super::realalg::reduce_mod(&coeffs, &self.modulus);
        }
        coeffs.resize(self.degree, Rat::zero());
        NfElem {
            field: self.clone(),
            coeffs,
        }
    }
}

/// Element of a number field, as a polynomial of degree < [K:Q] in the
/// generator.
#[derive(Debug, Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coeffs: Vec<Rat>,
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl NfElem {
    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        NfElem {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        NfElem {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.field.degree;
        let mut prod = vec![Rat::zero(); 2 * n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let reduced = super::realalg::reduce_mod(&prod, &self.field.modulus);
        NfElem {
            field: self.field.clone(),
            coeffs: reduced,
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let modulus: Vec<Rat> = self
            .field
            .modulus
            .coeffs()
            .iter()
            .map(|c| Rat::from(c.clone()))
            .collect();
        // extended gcd(self, modulus): since the modulus is irreducible the
        // gcd is a nonzero constant
        let (mut r0, mut r1) = (self.coeffs.clone(), modulus);
        let (mut s0, mut s1) = (vec![Rat::one()], vec![Rat::zero()]);
        trim(&mut r0);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd constant; inverse = s0 / r0
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let coeffs: Vec<Rat> = s0.iter().map(|x| x / &c).collect();
        Some(self.field.from_coeffs(coeffs))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Trace of multiplication by this element (trace form ingredient).
    pub fn trace(&self) -> Rat {
        let n = self.field.degree;
        let mut tr = Rat::zero();
        // trace of mult-by-x^k precomputed via power sums would be nicer, but
        // the straightforward matrix trace is fine at these degrees
        for k in 0..n {
            // column k of the multiplication matrix = coeffs of elem * x^k
            let mut xk = vec![Rat::zero(); k + 1];
            xk[k] = Rat::one();
            let shifted = self.field.from_coeffs(poly_mul(&self.coeffs, &xk));
            tr += &shifted.coeffs[k];
        }
        tr
    }

    /// Exact sign in the real embedding sending the generator to `root`.
    pub fn sign_at(&self, root: &RealAlgebraic) -> Ordering {
        debug_assert_eq!(root.min_poly(), &self.field.modulus);
        root.sign_of_poly(&self.coeffs)
    }

    /// Evaluate an integer polynomial at this element.
    pub fn eval_int_poly(&self, p: &IntPoly) -> NfElem {
        let mut acc = self.field.zero();
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&self.field.from_rat(Rat::from(c.clone())));
        }
        acc
    }
}

fn trim(v: &mut Vec<Rat>) {
    while matches!(v.last(), Some(c) if c.is_zero()) {
        v.pop();
    }
}

fn poly_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    assert!(!b.is_empty());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rat::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    for i in (b.len() - 1..r.len()).rev() {
        let c = &r[i] / &lead;
        if c.is_zero() {
            continue;
        }
        q[i - (b.len() - 1)] = c.clone();
        for (j, bc) in b.iter().enumerate() {
            let t = &c * bc;
            r[i - (b.len() - 1) + j] -= t;
        }
    }
    r.truncate(b.len() - 1);
    trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(Rat::zero);
        let y = b.get(i).cloned().unwrap_or_else(Rat::zero);
        *o = x - y;
    }
    trim(&mut out);
    out
}

/// Kernel of a square matrix with number-field entries, returned as a basis
/// of row vectors over the field.
pub fn nf_kernel(field: &Arc<NumberField>, m: &[Vec<NfElem>]) -> Vec<Vec<NfElem>> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<NfElem>> = m.to_vec();
    let mut pivots: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for col in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].inv().expect("pivot invertible");
        for j in 0..cols {
            a[r][j] = a[r][j].mul(&inv);
        }
        for i in 0..rows {
            if i == r || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in 0..cols {
                let t = f.mul(&a[r][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
        pivots[col] = Some(r);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| pivots[c].is_none()).collect();
    free.iter()
        .map(|&fc| {
            (0..cols)
                .map(|c| {
                    if c == fc {
                        field.one()
                    } else if let Some(pr) = pivots[c] {
                        a[pr][fc].neg()
                    } else {
                        field.zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Norm of an element: determinant of its multiplication matrix, computed
/// as the resultant of the modulus with the element polynomial.
pub fn nf_norm(e: &NfElem) -> Rat {
    let mut denom = Int::one();
    for c in e.coeffs() {
        denom = num_integer::Integer::lcm(&denom, c.denom());
    }
    let num = IntPoly::new(
        e.coeffs()
            .iter()
            .map(|c| (c * Rat::from(denom.clone())).to_integer())
            .collect(),
    );
    if num.is_zero() {
        return Rat::zero();
    }
    let m = e.field().modulus();
    let res = m.resultant(&num).expect("nonzero inputs");
    // res(m, num) = lc(m)^deg(num) * prod num(root) = prod num(root_i);
    // norm(e) = prod e(root_i) = res / denom^deg(m)
    Rat::new(res, denom.pow(m.degree() as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn field_arithmetic_sqrt2() {
        let k = NumberField::new(IntPoly::from_i64(&[-2, 0, 1]));
        let s = k.generator();
        assert_eq!(s.mul(&s), k.from_rat(rat(2, 1)));
        let inv = s.inv().unwrap();
        assert_eq!(s.mul(&inv), k.one());
        // 1/sqrt(2) = sqrt(2)/2
        assert_eq!(inv, s.scale(&rat(1, 2)));
        assert_eq!(nf_norm(&s), rat(-2, 1));
    }

    #[test]
    fn kernel_over_field() {
        let k = NumberField::new(IntPoly::from_i64(&[-2, 0, 1]));
        let s = k.generator();
        // rows of [[1, sqrt2], [sqrt2, 2]] are dependent
        let m = vec![
            vec![k.one(), s.clone()],
            vec![s.clone(), k.from_rat(rat(2, 1))],
        ];
        let ker = nf_kernel(&k, &m);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        let lhs = m[0][0].mul(&v[0]).add(&m[0][1].mul(&v[1]));
        assert!(lhs.is_zero());
    }

    #[test]
    fn trace_matches_sum_of_embeddings() {
        let k = NumberField::new(IntPoly::from_i64(&[-2, 0, 1]));
        // trace(a + b*sqrt2) = 2a
        let e = k.from_coeffs(vec![rat(3, 1), rat(5, 1)]);
        assert_eq!(e.trace(), rat(6, 1));
    }
}
