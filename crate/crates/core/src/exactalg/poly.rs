//! Univariate polynomials over the integers, coefficients lowest degree first.

use super::{ExactError, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

/// Integer polynomial; invariant: no trailing zero coefficients, so the
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    coeffs: Vec<Int>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{}", a)?,
                1 if a.is_one() => write!(f, "x")?,
                1 => write!(f, "{}*x", a)?,
                _ if a.is_one() => write!(f, "x^{}", i)?,
                _ => write!(f, "{}*x^{}", a, i)?,
            }
        }
        Ok(())
    }
}

impl IntPoly {
    pub fn new(coeffs: Vec<Int>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::constant(Int::one())
    }

    pub fn constant(c: Int) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial x^n.
    pub fn xpow(n: usize) -> Self {
        let mut coeffs = vec![Int::zero(); n + 1];
        coeffs[n] = Int::one();
        IntPoly { coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Int {
        self.coeffs.get(i).cloned().unwrap_or_else(Int::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 by convention, so check
    /// `is_zero` first where it matters.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Int {
        self.coeffs.last().cloned().unwrap_or_else(Int::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn neg(&self) -> Self {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Int::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &Int) -> Self {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
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

    pub fn eval_int(&self, x: &Int) -> Int {
        let mut acc = Int::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rat::from(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Int::from(i + 1))
                .collect(),
        )
    }

    /// p(-x).
    pub fn substitute_neg_x(&self) -> Self {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// x^deg * p(1/x).
    pub fn reverse(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        IntPoly::new(coeffs)
    }

    /// Reciprocal means x^deg p(1/x) = p, i.e. palindromic coefficients.
    pub fn is_reciprocal(&self) -> bool {
        !self.is_zero() && self.reverse() == *self
    }

    /// Exact division by a monic divisor. Panics if the division is inexact;
    /// callers use this only where exactness is an invariant.
    pub fn div_exact_monic(&self, d: &Self) -> Self {
        let (q, r) = self.divrem_monic(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Division with remainder by a monic divisor (stays over the integers).
    pub fn divrem_monic(&self, d: &Self) -> (Self, Self) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (IntPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Int::zero(); self.degree() - dd + 1];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
        }
        rem.truncate(dd);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// Content (gcd of coefficients, nonnegative).
    pub fn content(&self) -> Int {
        let mut g = Int::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Primitive gcd over the integers (sign-normalized to positive leading
    /// coefficient), via a primitive pseudo-remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.is_zero() {
            return normalize_sign(b);
        }
        while !b.is_zero() {
            let r = pseudo_rem(&a, &b).primitive_part();
            a = b;
            b = r;
        }
        normalize_sign(a)
    }

    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.primitive_part();
        }
        // g is primitive and divides the primitive part exactly.
        exact_div_primitive(&self.primitive_part(), &g)
    }

    /// Resultant of two nonzero polynomials, as the determinant of the
    /// Sylvester matrix (computed fraction-free).
    pub fn resultant(&self, other: &Self) -> Result<Int, ExactError> {
        if self.is_zero() || other.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let m = self.degree();
        let n = other.degree();
        if m == 0 {
            return Ok(self.leading().pow(n as u32));
        }
        if n == 0 {
            return Ok(other.leading().pow(m as u32));
        }
        let size = m + n;
        let mut rows: Vec<Vec<Int>> = Vec::with_capacity(size);
        for i in 0..n {
            let mut row = vec![Int::zero(); size];
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                row[i + j] = c.clone();
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![Int::zero(); size];
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                row[i + j] = c.clone();
            }
            rows.push(row);
        }
        Ok(super::matrix::bareiss_det(rows))
    }
}

fn normalize_sign(p: IntPoly) -> IntPoly {
    if p.leading().is_negative() {
        p.neg()
    } else {
        p
    }
}

/// Pseudo-remainder scaled by a positive power of |lc(d)| so the sign pattern
/// is preserved (needed for Sturm chains).
pub fn pseudo_rem(n: &IntPoly, d: &IntPoly) -> IntPoly {
    assert!(!d.is_zero());
    let mut r = n.clone();
    let dd = d.degree();
    let lc = d.leading();
    let lc2 = &lc * &lc;
    while !r.is_zero() && r.degree() >= dd {
        let k = r.degree() - dd;
        let c = r.leading();
        // r <- lc^2 r - (lc c) x^k d keeps the scaling factor positive
        r = r.scale(&lc2).sub(&d.mul(&IntPoly::xpow(k)).scale(&(&lc * &c)));
        if !r.is_zero() && r.degree() >= dd + k {
            // defensive: the leading term must have cancelled
            unreachable!("pseudo-division failed to reduce degree");
        }
    }
    r
}

fn exact_div_primitive(a: &IntPoly, b: &IntPoly) -> IntPoly {
    // rational division that must come out integral
    let (q, r) = qdivrem(a, b);
    assert!(r.iter().all(|c| c.is_zero()), "inexact division");
    IntPoly::new(
        q.iter()
            .map(|c| {
                assert!(c.is_integer(), "inexact division");
                c.to_integer()
            })
            .collect(),
    )
}

/// Division with remainder over the rationals; returns coefficient vectors.
pub fn qdivrem(a: &IntPoly, b: &IntPoly) -> (Vec<Rat>, Vec<Rat>) {
    assert!(!b.is_zero());
    let mut rem: Vec<Rat> = a.coeffs.iter().map(|c| Rat::from(c.clone())).collect();
    let db = b.degree();
    let lb = Rat::from(b.leading());
    if a.is_zero() || a.degree() < db {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); a.degree() - db + 1];
    for i in (db..rem.len()).rev() {
        let c = &rem[i] / &lb;
        if c.is_zero() {
            continue;
        }
        quot[i - db] = c.clone();
        for (j, bc) in b.coeffs.iter().enumerate() {
            let t = &c * Rat::from(bc.clone());
            rem[i - db + j] -= t;
        }
        rem[i] = Rat::zero();
    }
    rem.truncate(db);
    (quot, rem)
}

/// The k-th cyclotomic polynomial, of degree phi(k).
pub fn cyclotomic(k: u64) -> Result<IntPoly, ExactError> {
    if k == 0 {
        return Err(ExactError::Domain("cyclotomic index must be >= 1".into()));
    }
    static CACHE: Lazy<Mutex<HashMap<u64, IntPoly>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(p) = CACHE.lock().unwrap().get(&k) {
        return Ok(p.clone());
    }
    // x^k - 1 divided by the cyclotomics of proper divisors
    let mut num = IntPoly::xpow(k as usize).sub(&IntPoly::one());
    for d in 1..k {
        if k % d == 0 {
            num = num.div_exact_monic(&cyclotomic(d)?);
        }
    }
    CACHE.lock().unwrap().insert(k, num.clone());
    Ok(num)
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = 0;
            while n % p == 0 {
                n /= p;
                m += 1;
            }
            out.push((p, m));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Minimum dimension admitting an integer matrix of multiplicative order n:
/// 0 for n = 1, 1 for n = 2, D(n/2) for n ≡ 2 mod 4, and otherwise the sum
/// of phi(p^m) over the prime factorization.
pub fn order_dimension(n: u64) -> Result<u64, ExactError> {
    if n == 0 {
        return Err(ExactError::Domain("order must be >= 1".into()));
    }
    if n == 1 {
        return Ok(0);
    }
    if n == 2 {
        return Ok(1);
    }
    if n % 2 == 0 && (n / 2) % 2 == 1 {
        return order_dimension(n / 2);
    }
    Ok(factorize_u64(n)
        .into_iter()
        .map(|(p, m)| euler_phi(p.pow(m)))
        .sum())
}

/// Trace polynomial R with P(x) = x^m R(x + 1/x); requires P monic reciprocal
/// of even degree 2m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePoly {
    pub trace: IntPoly,
    pub source: IntPoly,
}

pub fn trace_polynomial(p: &IntPoly) -> Result<TracePoly, ExactError> {
    if p.is_zero() || !p.is_monic() {
        return Err(ExactError::NotMonic);
    }
    if p.degree() % 2 != 0 || !p.is_reciprocal() {
        return Err(ExactError::NotReciprocal);
    }
    let m = p.degree() / 2;
    // v_k(y) = x^k + x^-k under y = x + 1/x:  v_0 = 2, v_1 = y,
    // v_{k+1} = y v_k - v_{k-1}
    let y = IntPoly::xpow(1);
    let mut v_prev = IntPoly::constant(Int::from(2));
    let mut v_cur = y.clone();
    let mut r = IntPoly::constant(p.coeff(m));
    for k in 1..=m {
        r = r.add(&v_cur.scale(&p.coeff(m + k)));
        let v_next = y.mul(&v_cur).sub(&v_prev);
        v_prev = v_cur;
        v_cur = v_next;
    }
    // sanity: expanding x^m R(x + 1/x) must reproduce P
    let expanded = expand_trace_form(&r, m);
    assert_eq!(&expanded, p, "trace polynomial round-trip failed");
    Ok(TracePoly {
        trace: r,
        source: p.clone(),
    })
}

/// x^m R(x + 1/x) as an integer polynomial (R of degree <= m).
pub fn expand_trace_form(r: &IntPoly, m: usize) -> IntPoly {
    // substitute y -> x^2 + 1 over numerator, tracking powers of x
    // x^m R(x + 1/x) = sum_k r_k x^(m-k) (x^2+1)^k
    let x2p1 = IntPoly::from_i64(&[1, 0, 1]);
    let mut acc = IntPoly::zero();
    for (k, c) in r.coeffs().iter().enumerate() {
        let term = x2p1.pow(k as u32).scale(c).mul(&IntPoly::xpow(m - k));
        acc = acc.add(&term);
    }
    acc
}

/// Irreducibility over Q for monic integer polynomials of modest degree.
///
/// Strategy: rational-root check, then factor-degree patterns modulo several
/// primes (distinct-degree bookkeeping); if patterns stay ambiguous, a
/// Kronecker-style trial factor search settles it exactly.
pub fn is_irreducible(p: &IntPoly) -> Result<bool, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if !p.is_monic() {
        return Err(ExactError::NotMonic);
    }
    let n = p.degree();
    if n == 0 {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    if p.coeff(0).is_zero() {
        return Ok(false); // divisible by x
    }
    // integer roots divide the constant term
    if integer_root_exists(p) {
        return Ok(false);
    }
    if n <= 3 {
        return Ok(true); // cubic or lower with no rational root
    }
    // possible proper factor degrees, narrowed by factor patterns mod p
    let mut possible: Vec<usize> = (2..=n / 2).collect();
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    for &q in &primes {
        if (p.leading().clone() % Int::from(q)).is_zero() {
            continue;
        }
        if let Some(degs) = modp_factor_degrees(p, q) {
            if degs.len() == 1 {
                return Ok(true);
            }
            let sums = subset_sums(&degs, n);
            possible.retain(|d| sums.contains(d) || sums.contains(&(n - d)));
            if possible.is_empty() && !sums.contains(&1) {
                return Ok(true);
            }
        }
    }
    // Kronecker fallback for the surviving candidate degrees
    for &d in &possible {
        if kronecker_factor_of_degree(p, d).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn integer_root_exists(p: &IntPoly) -> bool {
    let c0 = p.coeff(0);
    if c0.is_zero() {
        return true;
    }
    let abs = c0.abs();
    let mut d = Int::one();
    while &d * &d <= abs {
        if (abs.clone() % &d).is_zero() {
            for cand in [d.clone(), -d.clone(), abs.clone() / &d, -(abs.clone() / &d)] {
                if p.eval_int(&cand).is_zero() {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

fn subset_sums(degs: &[usize], total: usize) -> Vec<usize> {
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &d in degs {
        for s in (0..=total.saturating_sub(d)).rev() {
            if reach[s] {
                reach[s + d] = true;
            }
        }
    }
    (1..total).filter(|&s| reach[s]).collect()
}

/// Degrees of the irreducible factors of p mod q (with multiplicity), or None
/// when p mod q is not squarefree (uninformative for pattern pruning).
fn modp_factor_degrees(p: &IntPoly, q: u64) -> Option<Vec<usize>> {
    let f = ModPoly::from_int(p, q);
    let fp = f.derivative();
    if f.gcd(&fp).deg() != 0 {
        return None;
    }
    // distinct-degree: gcd(x^{q^d} - x, f)
    let mut degs = vec![];
    let mut rest = f.clone();
    let mut xq = ModPoly::x(q); // x^(q^d) mod rest, maintained by repeated powering
    let mut d = 0usize;
    while rest.deg() > 0 {
        d += 1;
        if d > rest.deg() {
            break;
        }
        xq = xq.pow_mod(q, &rest);
        let g = rest.gcd(&xq.sub(&ModPoly::x(q)));
        if g.deg() > 0 {
            for _ in 0..(g.deg() / d) {
                degs.push(d);
            }
            rest = rest.div_exact(&g);
            xq = xq.rem(&rest);
        }
        if rest.deg() > 0 && 2 * (d + 1) > rest.deg() + 1 && rest.deg() > 0 {
            // remaining factor is irreducible
        }
    }
    if rest.deg() > 0 {
        degs.push(rest.deg());
    }
    Some(degs)
}

/// Kronecker interpolation search for a monic factor of exactly degree d.
fn kronecker_factor_of_degree(p: &IntPoly, d: usize) -> Option<IntPoly> {
    // evaluation points 0, 1, -1, 2, -2, ...
    let mut points: Vec<Int> = vec![];
    let mut k = 0i64;
    while points.len() < d + 1 {
        let x = Int::from(k);
        if !p.eval_int(&x).is_zero() {
            points.push(x);
        }
        k = if k > 0 { -k } else { -k + 1 };
    }
    let values: Vec<Int> = points.iter().map(|x| p.eval_int(x)).collect();
    let divisor_lists: Vec<Vec<Int>> = values.iter().map(|v| signed_divisors(v)).collect();
    let mut choice = vec![0usize; d + 1];
    loop {
        // monic interpolation candidate through (points[i], divisors[choice[i]])
        let vals: Vec<Int> = (0..=d)
            .map(|i| divisor_lists[i][choice[i]].clone())
            .collect();
        if let Some(g) = interpolate_monic(&points, &vals, d) {
            let (_, r) = p.divrem_monic(&g);
            if r.is_zero() && g.degree() == d {
                return Some(g);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            choice[i] += 1;
            if choice[i] < divisor_lists[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
            if i > d {
                return None;
            }
        }
    }
}

fn signed_divisors(v: &Int) -> Vec<Int> {
    let abs = v.abs();
    let mut out = vec![];
    let mut d = Int::one();
    while &d * &d <= abs {
        if (abs.clone() % &d).is_zero() {
            out.push(d.clone());
            out.push(-d.clone());
            let e = abs.clone() / &d;
            if e != d {
                out.push(e.clone());
                out.push(-e);
            }
        }
        d += 1;
    }
    out
}

/// Lagrange interpolation; returns the polynomial only if it is monic of
/// degree d with integer coefficients.
fn interpolate_monic(points: &[Int], values: &[Int], d: usize) -> Option<IntPoly> {
    let n = points.len();
    let mut acc = vec![Rat::zero(); n];
    for i in 0..n {
        // basis polynomial for point i
        let mut numer = vec![Rat::zero(); n];
        numer[0] = Rat::one();
        let mut len = 1;
        let mut denom = Rat::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let xj = Rat::from(points[j].clone());
            for t in (0..len).rev() {
                let v = numer[t].clone();
                numer[t + 1] += &v;
                numer[t] = -(&v * &xj);
            }
            len += 1;
            denom *= Rat::from(points[i].clone()) - xj;
        }
        let w = Rat::from(values[i].clone()) / denom;
        for t in 0..len {
            acc[t] += &numer[t] * &w;
        }
    }
    while matches!(acc.last(), Some(c) if c.is_zero()) {
        acc.pop();
    }
    if acc.len() != d + 1 {
        return None;
    }
    if !acc[d].is_one() {
        return None;
    }
    let mut out = Vec::with_capacity(acc.len());
    for c in acc {
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer());
    }
    Some(IntPoly::new(out))
}

/// Polynomials over Z/q for small primes q, used only for factor-degree
/// pattern pruning inside the irreducibility test.
#[derive(Clone, Debug, PartialEq)]
struct ModPoly {
    c: Vec<u64>,
    q: u64,
}

impl ModPoly {
    fn from_int(p: &IntPoly, q: u64) -> Self {
        let qi = Int::from(q);
        let mut c: Vec<u64> = p
            .coeffs()
            .iter()
            .map(|a| {
                let m = ((a % &qi) + &qi) % &qi;
                u64::try_from(m).unwrap()
            })
            .collect();
        while matches!(c.last(), Some(0)) {
            c.pop();
        }
        ModPoly { c, q }
    }

    fn x(q: u64) -> Self {
        ModPoly { c: vec![0, 1], q }
    }

    fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn trim(mut self) -> Self {
        while matches!(self.c.last(), Some(0)) {
            self.c.pop();
        }
        self
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut c = vec![0u64; n];
        for (i, ci) in c.iter_mut().enumerate() {
            let a = self.c.get(i).copied().unwrap_or(0);
            let b = o.c.get(i).copied().unwrap_or(0);
            *ci = (a + self.q - b) % self.q;
        }
        ModPoly { c, q: self.q }.trim()
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return ModPoly {
                c: vec![],
                q: self.q,
            };
        }
        let mut c = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % self.q;
            }
        }
        ModPoly { c, q: self.q }.trim()
    }

    fn rem(&self, m: &Self) -> Self {
        assert!(!m.is_zero());
        let inv = mod_inverse(*m.c.last().unwrap(), self.q);
        let mut r = self.c.clone();
        let dm = m.deg();
        while r.len() > dm {
            let lead = *r.last().unwrap() % self.q;
            if lead != 0 {
                let f = lead * inv % self.q;
                let shift = r.len() - 1 - dm;
                for (j, &mc) in m.c.iter().enumerate() {
                    let t = f * mc % self.q;
                    r[shift + j] = (r[shift + j] + self.q - t) % self.q;
                }
            }
            r.pop();
            while matches!(r.last(), Some(0)) {
                r.pop();
            }
            if r.len() <= dm {
                break;
            }
        }
        ModPoly { c: r, q: self.q }.trim()
    }

    fn div_exact(&self, d: &Self) -> Self {
        let inv = mod_inverse(*d.c.last().unwrap(), self.q);
        let mut r = self.c.clone();
        let dd = d.deg();
        let mut q = vec![0u64; self.c.len().saturating_sub(dd)];
        for i in (dd..r.len()).rev() {
            let lead = r[i] % self.q;
            if lead != 0 {
                let f = lead * inv % self.q;
                q[i - dd] = f;
                for (j, &dc) in d.c.iter().enumerate() {
                    let t = f * dc % self.q;
                    r[i - dd + j] = (r[i - dd + j] + self.q - t) % self.q;
                }
            }
        }
        ModPoly { c: q, q: self.q }.trim()
    }

    fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone().trim();
        let mut b = o.clone().trim();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if !a.is_zero() {
            // make monic
            let inv = mod_inverse(*a.c.last().unwrap(), a.q);
            for c in a.c.iter_mut() {
                *c = *c * inv % a.q;
            }
        }
        a
    }

    fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return ModPoly {
                c: vec![],
                q: self.q,
            };
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, &a)| a * ((i as u64 + 1) % self.q) % self.q)
            .collect();
        ModPoly { c, q: self.q }.trim()
    }

    /// self^e mod m.
    fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = ModPoly {
            c: vec![1],
            q: self.q,
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }
}

fn mod_inverse(a: u64, q: u64) -> u64 {
    // q is a small prime
    let mut t = (0i64, 1i64);
    let mut r = (q as i64, (a % q) as i64);
    while r.1 != 0 {
        let quot = r.0 / r.1;
        t = (t.1, t.0 - quot * t.1);
        r = (r.1, r.0 - quot * r.1);
    }
    ((t.0 % q as i64 + q as i64) % q as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1).unwrap(), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2).unwrap(), IntPoly::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(12).unwrap(), IntPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert!(cyclotomic(0).is_err());
    }

    #[test]
    fn trace_poly_examples() {
        // minimal polynomial with trace form y^3 - 4y - 2
        let s8 = IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1]);
        let tp = trace_polynomial(&s8).unwrap();
        assert_eq!(tp.trace, IntPoly::from_i64(&[-2, -4, 0, 1]));

        let p = IntPoly::from_i64(&[1, 0, 1]); // x^2 + 1
        assert_eq!(trace_polynomial(&p).unwrap().trace, IntPoly::from_i64(&[0, 1]));

        let p = IntPoly::from_i64(&[1, -3, 1]);
        assert_eq!(
            trace_polynomial(&p).unwrap().trace,
            IntPoly::from_i64(&[-3, 1])
        );

        assert!(trace_polynomial(&IntPoly::from_i64(&[1, 2, 1, 1])).is_err());
    }

    #[test]
    fn resultant_symmetry_sign() {
        let p = IntPoly::from_i64(&[1, 2, 3, 1]);
        let q = IntPoly::from_i64(&[-1, 0, 1]);
        let r1 = p.resultant(&q).unwrap();
        let r2 = q.resultant(&p).unwrap();
        // res(p,q) = (-1)^(deg p * deg q) res(q,p)
        let sign = if (p.degree() * q.degree()) % 2 == 1 {
            -r2.clone()
        } else {
            r2.clone()
        };
        assert_eq!(r1, sign);
        // shared roots give zero
        assert!(p.resultant(&p).unwrap().is_zero());
        assert!(p.resultant(&IntPoly::zero()).is_err());
    }

    #[test]
    fn order_dimension_examples() {
        assert_eq!(order_dimension(1).unwrap(), 0);
        assert_eq!(order_dimension(2).unwrap(), 1);
        assert_eq!(order_dimension(15).unwrap(), 6);
        assert_eq!(order_dimension(6).unwrap(), 2); // = D(3)
        assert_eq!(order_dimension(8).unwrap(), 4);
    }

    #[test]
    fn irreducibility_basics() {
        assert!(is_irreducible(&IntPoly::from_i64(&[1, 0, 1])).unwrap());
        assert!(!is_irreducible(&IntPoly::from_i64(&[-1, 0, 1])).unwrap());
        // x^4 + 1 is reducible mod every prime yet irreducible over Q
        assert!(is_irreducible(&IntPoly::from_i64(&[1, 0, 0, 0, 1])).unwrap());
        // (x^2+1)(x^2+x+1)
        let p = IntPoly::from_i64(&[1, 0, 1]).mul(&IntPoly::from_i64(&[1, 1, 1]));
        assert!(!is_irreducible(&p).unwrap());
        // Lehmer's degree-10 polynomial
        let lehmer = IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!(is_irreducible(&lehmer).unwrap());
    }

    #[test]
    fn gcd_and_squarefree() {
        let p = IntPoly::from_i64(&[-1, 0, 1]); // (x-1)(x+1)
        let q = IntPoly::from_i64(&[-1, 1]);
        assert_eq!(p.gcd(&q), IntPoly::from_i64(&[-1, 1]));
        let sq = p.mul(&p).mul(&q);
        let sf = sq.squarefree_part();
        assert_eq!(sf.degree(), 2);
        assert!(sf.gcd(&sf.derivative()).degree() == 0);
    }
}
