//! Exact dense matrices: `IMat` over the integers, `QMat` over the rationals.

use super::poly::IntPoly;
use super::{ExactError, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Int) -> Self {
        let mut m = IMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        IMat::from_fn(r, c, |i, j| Int::from(rows[i][j]))
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IMat { rows, cols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..i {
                if self.at(i, j) != self.at(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        IMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = IMat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * o.at(k, j);
                    *out.at_mut(i, j) += t;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + o.at(i, j))
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IMat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - o.at(i, j))
    }

    pub fn neg(&self) -> Self {
        IMat::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn scale(&self, c: &Int) -> Self {
        IMat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for j in 0..self.cols {
                    acc += self.at(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Int {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i).clone()).sum()
    }

    pub fn det(&self) -> Result<Int, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let rows: Vec<Vec<Int>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        Ok(bareiss_det(rows))
    }

    pub fn to_qmat(&self) -> QMat {
        QMat::from_fn(self.rows, self.cols, |i, j| Rat::from(self.at(i, j).clone()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = IMat::identity(self.rows);
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

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IMat::identity(self.rows)
    }

    /// Multiplicative order, up to a cap; None if the cap is exceeded.
    pub fn order(&self, cap: u64) -> Option<u64> {
        let mut m = self.clone();
        for k in 1..=cap {
            if m.is_identity() {
                return Some(k);
            }
            m = m.mul(self);
        }
        None
    }

    /// Characteristic polynomial det(xI - M), monic, exact over the integers
    /// (Faddeev–LeVerrier; the divisions are exact).
    pub fn char_poly(&self) -> Result<IntPoly, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut coeffs = vec![Int::zero(); n + 1];
        coeffs[n] = Int::one();
        let mut m = self.clone();
        let mut c = Int::one();
        for k in 1..=n {
            if k > 1 {
                let mut mc = m.clone();
                for i in 0..n {
                    *mc.at_mut(i, i) += &c;
                }
                m = self.mul(&mc);
            }
            let t = m.trace();
            let (q, r) = (-t).div_rem(&Int::from(k));
            debug_assert!(r.is_zero());
            c = q;
            coeffs[n - k] = c.clone();
        }
        Ok(IntPoly::new(coeffs))
    }

    /// Evaluate an integer polynomial at this matrix.
    pub fn eval_poly(&self, p: &IntPoly) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = IMat::zero(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                *acc.at_mut(i, i) += c;
            }
        }
        acc
    }

    /// Smith normal form with unimodular transforms: U * M * V = S.
    pub fn smith_normal_form(&self) -> SmithForm {
        let mut s = self.clone();
        let mut u = IMat::identity(self.rows);
        let mut v = IMat::identity(self.cols);
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            // find pivot of minimal absolute value in remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    if !s.at(i, j).is_zero()
                        && pivot
                            .map(|(pi, pj)| s.at(i, j).abs() < s.at(pi, pj).abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            // clear row and column t
            let mut again = true;
            while again {
                again = false;
                for i in t + 1..s.rows {
                    if !s.at(i, t).is_zero() {
                        let q = rounded_div(s.at(i, t), s.at(t, t));
                        if !q.is_zero() {
                            s.row_op(i, t, &q);
                            u.row_op(i, t, &q);
                        }
                        if !s.at(i, t).is_zero() {
                            s.swap_rows(t, i);
                            u.swap_rows(t, i);
                            again = true;
                        }
                    }
                }
                for j in t + 1..s.cols {
                    if !s.at(t, j).is_zero() {
                        let q = rounded_div(s.at(t, j), s.at(t, t));
                        if !q.is_zero() {
                            s.col_op(j, t, &q);
                            v.col_op(j, t, &q);
                        }
                        if !s.at(t, j).is_zero() {
                            s.swap_cols(t, j);
                            v.swap_cols(t, j);
                            again = true;
                        }
                    }
                }
            }
            // divisibility fix-up: pivot must divide the rest of the block
            let mut clean = true;
            'scan: for i in t + 1..s.rows {
                for j in t + 1..s.cols {
                    if !(s.at(i, j) % s.at(t, t)).is_zero() {
                        // fold row i into row t and restart this pivot
                        let one = Int::from(-1);
                        s.row_op(t, i, &one);
                        u.row_op(t, i, &one);
                        clean = false;
                        break 'scan;
                    }
                }
            }
            if clean {
                if s.at(t, t).is_negative() {
                    for j in 0..s.cols {
                        let x = -s.at(t, j).clone();
                        *s.at_mut(t, j) = x;
                    }
                    for j in 0..u.cols {
                        let x = -u.at(t, j).clone();
                        *u.at_mut(t, j) = x;
                    }
                }
                t += 1;
            }
        }
        SmithForm { s, u, v }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let x = self.at(a, j).clone();
            let y = self.at(b, j).clone();
            *self.at_mut(a, j) = y;
            *self.at_mut(b, j) = x;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let x = self.at(i, a).clone();
            let y = self.at(i, b).clone();
            *self.at_mut(i, a) = y;
            *self.at_mut(i, b) = x;
        }
    }

    /// row a -= q * row b
    fn row_op(&mut self, a: usize, b: usize, q: &Int) {
        for j in 0..self.cols {
            let t = q * self.at(b, j);
            *self.at_mut(a, j) -= t;
        }
    }

    /// col a -= q * col b
    fn col_op(&mut self, a: usize, b: usize, q: &Int) {
        for i in 0..self.rows {
            let t = q * self.at(i, b);
            *self.at_mut(i, a) -= t;
        }
    }

    /// Row Hermite normal form (upper echelon, positive pivots, entries above
    /// a pivot reduced); returns (H, rank). Zero rows are dropped.
    pub fn hermite_rows(&self) -> (IMat, usize) {
        let mut h = self.clone();
        let mut pivot_row = 0;
        for col in 0..h.cols {
            if pivot_row >= h.rows {
                break;
            }
            // reduce rows below to create a single pivot via gcd steps
            loop {
                let mut best: Option<usize> = None;
                for i in pivot_row..h.rows {
                    if !h.at(i, col).is_zero()
                        && best
                            .map(|b| h.at(i, col).abs() < h.at(b, col).abs())
                            .unwrap_or(true)
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_row, b);
                let mut done = true;
                for i in pivot_row + 1..h.rows {
                    if !h.at(i, col).is_zero() {
                        let q = rounded_div(h.at(i, col), h.at(pivot_row, col));
                        h.row_op(i, pivot_row, &q);
                        if !h.at(i, col).is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if h.at(pivot_row, col).is_zero() {
                continue;
            }
            if h.at(pivot_row, col).is_negative() {
                for j in 0..h.cols {
                    let x = -h.at(pivot_row, j).clone();
                    *h.at_mut(pivot_row, j) = x;
                }
            }
            // reduce entries above the pivot
            for i in 0..pivot_row {
                let q = h.at(i, col).div_floor(h.at(pivot_row, col));
                if !q.is_zero() {
                    h.row_op(i, pivot_row, &q);
                }
            }
            pivot_row += 1;
        }
        let rank = pivot_row;
        let mut out = IMat::zero(rank, h.cols);
        for i in 0..rank {
            for j in 0..h.cols {
                *out.at_mut(i, j) = h.at(i, j).clone();
            }
        }
        (out, rank)
    }

    /// Basis (as rows) of the saturation of the row span: the primitive
    /// sublattice of Z^cols containing the rows with finite index.
    pub fn saturated_row_basis(&self) -> IMat {
        let sf = self.smith_normal_form();
        let rank = (0..self.rows.min(self.cols))
            .filter(|&i| !sf.s.at(i, i).is_zero())
            .count();
        // rows of V^{-1} spanning the same Q-space: first `rank` rows of
        // (V^T)^{-1}... work instead with V: M = U^-1 S V^-1, row space of M
        // over Q = row space of S V^-1 = span of first `rank` rows of V^-1.
        let v_inv = sf
            .v
            .to_qmat()
            .inverse()
            .expect("unimodular matrix is invertible");
        IMat::from_fn(rank, self.cols, |i, j| {
            let x = v_inv.at(i, j);
            assert!(x.is_integer());
            x.to_integer()
        })
    }

    /// Basis (as rows) of the integer kernel {x : M x = 0}; saturated.
    pub fn kernel_basis(&self) -> IMat {
        let sf = self.smith_normal_form();
        let n = self.cols;
        let zero_idx: Vec<usize> = (0..n)
            .filter(|&i| i >= self.rows.min(n) || sf.s.at(i, i).is_zero())
            .collect();
        IMat::from_fn(zero_idx.len(), n, |r, j| sf.v.at(j, zero_idx[r]).clone())
    }
}

/// Smith normal form data: u * m * v = s with u, v unimodular and the
/// diagonal of s a divisor chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IMat,
    pub u: IMat,
    pub v: IMat,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.at(i, i).clone())
            .collect()
    }
}

fn rounded_div(a: &Int, b: &Int) -> Int {
    // nearest-integer division, ties toward zero
    let (q, r) = a.div_rem(b);
    let two_r = r.abs() * Int::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Fraction-free determinant (Bareiss), consuming the row data.
pub fn bareiss_det(mut m: Vec<Vec<Int>>) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    assert!(m.iter().all(|r| r.len() == n));
    let mut sign = 1i32;
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Int::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = t.div_rem(&prev);
                debug_assert!(r.is_zero());
                m[i][j] = q;
            }
            m[i][k] = Int::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = QMat::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                *m.at_mut(i, j) = f(i, j);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        QMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = QMat::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * o.at(k, j);
                    *out.at_mut(i, j) += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    acc += self.at(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_imat(&self) -> Result<IMat, ExactError> {
        if !self.is_integral() {
            return Err(ExactError::NotIntegral);
        }
        Ok(IMat::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).to_integer()
        }))
    }

    pub fn inverse(&self) -> Result<QMat, ExactError> {
        if self.rows != self.cols {
            return Err(ExactError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a.at(i, col).is_zero()) else {
                return Err(ExactError::Singular);
            };
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let piv = a.at(col, col).clone();
            for j in 0..n {
                let x = a.at(col, j) / &piv;
                *a.at_mut(col, j) = x;
                let y = inv.at(col, j) / &piv;
                *inv.at_mut(col, j) = y;
            }
            for i in 0..n {
                if i == col || a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).clone();
                for j in 0..n {
                    let t = &f * a.at(col, j);
                    *a.at_mut(i, j) -= t;
                    let t = &f * inv.at(col, j);
                    *inv.at_mut(i, j) -= t;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let x = self.at(a, j).clone();
            let y = self.at(b, j).clone();
            *self.at_mut(a, j) = y;
            *self.at_mut(b, j) = x;
        }
    }

    /// Basis of the right kernel {x : M x = 0}, as rows.
    pub fn kernel_basis(&self) -> QMat {
        let mut a = self.clone();
        let n = self.cols;
        let mut pivots: Vec<Option<usize>> = vec![None; n];
        let mut r = 0;
        for col in 0..n {
            if r >= a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.at(i, col).is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let piv = a.at(r, col).clone();
            for j in 0..n {
                let x = a.at(r, j) / &piv;
                *a.at_mut(r, j) = x;
            }
            for i in 0..a.rows {
                if i == r || a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).clone();
                for j in 0..n {
                    let t = &f * a.at(r, j);
                    *a.at_mut(i, j) -= t;
                }
            }
            pivots[col] = Some(r);
            r += 1;
        }
        let free: Vec<usize> = (0..n).filter(|&c| pivots[c].is_none()).collect();
        let mut out = QMat::zero(free.len(), n);
        for (k, &fc) in free.iter().enumerate() {
            *out.at_mut(k, fc) = Rat::one();
            for c in 0..n {
                if let Some(pr) = pivots[c] {
                    *out.at_mut(k, c) = -a.at(pr, fc).clone();
                }
            }
        }
        out
    }

    /// Scale rows to a common integer matrix (content removed per row).
    pub fn rows_to_primitive_int(&self) -> IMat {
        IMat::from_fn(self.rows, self.cols, |i, j| {
            let mut denom = Int::one();
            for c in 0..self.cols {
                denom = denom.lcm(self.at(i, c).denom());
            }
            let mut nums: Vec<Int> = (0..self.cols)
                .map(|c| (self.at(i, c) * Rat::from(denom.clone())).to_integer())
                .collect();
            let mut g = Int::zero();
            for x in &nums {
                g = g.gcd(x);
            }
            if !g.is_zero() && !g.is_one() {
                for x in nums.iter_mut() {
                    *x = &*x / &g;
                }
            }
            nums[j].clone()
        })
    }
}

/// Sylvester signature (positive, negative, null) of a symmetric rational
/// matrix via congruence diagonalization.
pub fn signature(g: &QMat) -> Result<(usize, usize, usize), ExactError> {
    if g.rows != g.cols {
        return Err(ExactError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    for i in 0..g.rows {
        for j in 0..i {
            if g.at(i, j) != g.at(j, i) {
                return Err(ExactError::NotSymmetric);
            }
        }
    }
    let n = g.rows;
    let mut a = g.clone();
    let (mut pos, mut neg, mut null) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if a.at(k, k).is_zero() {
            // try to bring a nonzero diagonal entry into position k
            if let Some(i) = (k + 1..n).find(|&i| !a.at(i, i).is_zero()) {
                sym_swap(&mut a, k, i);
            } else if let Some((i, j)) = find_offdiag(&a, k) {
                // x_i += x_j makes the (i,i) entry 2*a_ij != 0
                sym_add(&mut a, i, j, &Rat::one());
                if i != k {
                    sym_swap(&mut a, k, i);
                }
            } else {
                null += n - k;
                break;
            }
        }
        let piv = a.at(k, k).clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if !a.at(i, k).is_zero() {
                let f = -(a.at(i, k) / &piv);
                sym_add(&mut a, i, k, &f);
            }
        }
        k += 1;
    }
    Ok((pos, neg, null))
}

fn find_offdiag(a: &QMat, k: usize) -> Option<(usize, usize)> {
    for i in k..a.rows {
        for j in i + 1..a.cols {
            if !a.at(i, j).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

fn sym_swap(a: &mut QMat, i: usize, j: usize) {
    let n = a.rows;
    for c in 0..n {
        let x = a.at(i, c).clone();
        let y = a.at(j, c).clone();
        *a.at_mut(i, c) = y;
        *a.at_mut(j, c) = x;
    }
    for r in 0..n {
        let x = a.at(r, i).clone();
        let y = a.at(r, j).clone();
        *a.at_mut(r, i) = y;
        *a.at_mut(r, j) = x;
    }
}

/// congruence op x_i += f x_j (row and column together)
fn sym_add(a: &mut QMat, i: usize, j: usize, f: &Rat) {
    let n = a.rows;
    for c in 0..n {
        let t = f * a.at(j, c);
        *a.at_mut(i, c) += t;
    }
    for r in 0..n {
        let t = f * a.at(r, j);
        *a.at_mut(r, i) += t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4_gram() -> IMat {
        IMat::from_rows_i64(&[
            &[-2, 1, 1, 1],
            &[1, -2, 0, 0],
            &[1, 0, -2, 0],
            &[1, 0, 0, -2],
        ])
    }

    #[test]
    fn snf_identity_and_diag() {
        let m = IMat::identity(3);
        let sf = m.smith_normal_form();
        assert_eq!(sf.s, IMat::identity(3));
        let m = IMat::from_rows_i64(&[&[2, 0], &[0, 6]]);
        let sf = m.smith_normal_form();
        assert_eq!(sf.diagonal(), vec![Int::from(2), Int::from(6)]);
    }

    #[test]
    fn snf_d4() {
        // independent expected value: diag(1,1,2,2) by hand reduction
        let sf = d4_gram().smith_normal_form();
        assert_eq!(
            sf.diagonal(),
            vec![Int::one(), Int::one(), Int::from(2), Int::from(2)]
        );
        assert_eq!(sf.u.mul(&d4_gram()).mul(&sf.v), sf.s);
        assert_eq!(sf.u.det().unwrap().abs(), Int::one());
        assert_eq!(sf.v.det().unwrap().abs(), Int::one());
    }

    #[test]
    fn charpoly_examples() {
        let id2 = IMat::identity(2);
        assert_eq!(id2.char_poly().unwrap(), IntPoly::from_i64(&[1, -2, 1]));
        let rot = IMat::from_rows_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(rot.char_poly().unwrap(), IntPoly::from_i64(&[1, 0, 1]));
        // companion matrix of a degree-6 reciprocal polynomial
        let p = IntPoly::from_i64(&[1, 0, -1, -2, -1, 0, 1]);
        let c = companion(&p);
        assert_eq!(c.char_poly().unwrap(), p);
    }

    pub fn companion(p: &IntPoly) -> IMat {
        let n = p.degree();
        IMat::from_fn(n, n, |i, j| {
            if j + 1 == n {
                -p.coeff(i)
            } else if i == j + 1 {
                Int::one()
            } else {
                Int::zero()
            }
        })
    }

    #[test]
    fn signature_examples() {
        let u = IMat::from_rows_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(signature(&u.to_qmat()).unwrap(), (1, 1, 0));
        let e8 = crate::lattice::named("E8").unwrap().gram().clone();
        assert_eq!(signature(&e8.to_qmat()).unwrap(), (0, 8, 0));
    }

    #[test]
    fn kernel_and_saturation() {
        let m = IMat::from_rows_i64(&[&[2, 4, 6]]);
        let k = m.kernel_basis();
        assert_eq!(k.rows, 2);
        for i in 0..k.rows {
            let v: Vec<Int> = k.row(i).to_vec();
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
        // saturation of the span of (2,0) inside Z^2 is (1,0)
        let b = IMat::from_rows_i64(&[&[2, 0]]);
        let s = b.saturated_row_basis();
        assert_eq!(s.rows, 1);
        assert_eq!(s.at(0, 0).abs(), Int::one());
        assert!(s.at(0, 1).is_zero());
    }

    #[test]
    fn hermite_rows_shape() {
        let m = IMat::from_rows_i64(&[&[4, 6, 2], &[2, 2, 2], &[6, 8, 4]]);
        let (h, rank) = m.hermite_rows();
        assert_eq!(rank, 2);
        assert_eq!(h.rows, 2);
        assert!(h.at(0, 0).is_positive());
    }
}
