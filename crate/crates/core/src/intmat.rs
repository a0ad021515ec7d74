//! Dense integer matrices with Hermite and Smith normal forms.
//!
//! Matrices here are tiny (at most 4×8), so everything is done with
//! elementary unimodular row and column operations on arbitrary-precision
//! integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g` and `g >= 0`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Gcd with the convention `gcd(0, m) = |m|`.
pub fn gcd(a: &Int, b: &Int) -> Int {
    a.gcd(b)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_rows<T: Into<Int> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m.data[i * c + j] = v.clone().into();
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Int>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged column set");
            for (i, v) in col.iter().enumerate() {
                m.data[i * c + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Keeps the columns in `range`.
    pub fn column_block(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let cols: Vec<Vec<Int>> = range.map(|j| self.column(j)).collect();
        if cols.is_empty() {
            return IntMatrix::zeros(self.rows, 0);
        }
        IntMatrix::from_columns(&cols)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, k: &Int) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Gcd of all entries.
    pub fn content(&self) -> Int {
        self.data.iter().fold(Int::zero(), |g, x| g.gcd(x))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return Int::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    /// Adjugate matrix, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = IntMatrix::zeros(n, n);
        if n == 1 {
            adj.set(0, 0, Int::one());
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let minor_rows: Vec<Vec<Int>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| self.get(r, c).clone())
                            .collect()
                    })
                    .collect();
                let minor = IntMatrix::from_rows(&minor_rows).det();
                let cof = if (i + j) % 2 == 0 { minor } else { -minor };
                adj.set(j, i, cof);
            }
        }
        adj
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * k;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &Int) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * k;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    /// Replaces columns (i, j) by (s*ci + t*cj, u*ci + v*cj).
    fn combine_cols(&mut self, i: usize, j: usize, s: &Int, t: &Int, u: &Int, v: &Int) {
        for r in 0..self.rows {
            let ci = self.get(r, i).clone();
            let cj = self.get(r, j).clone();
            self.set(r, i, s * &ci + t * &cj);
            self.set(r, j, u * &ci + v * &cj);
        }
    }
}

/// Column-style Hermite normal form of a full-row-rank matrix.
///
/// `matrix * transform = [hnf | 0]` where `hnf` is square lower triangular with
/// positive diagonal and every entry left of a pivot reduced into `[0, pivot)`.
/// The trailing columns of `transform` span the integer kernel of `matrix`.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub hnf: IntMatrix,
    pub transform: IntMatrix,
}

pub fn column_hnf(m: &IntMatrix) -> Result<ColumnHnf> {
    let n = m.rows;
    let k = m.cols;
    if k < n {
        return Err(Error::DegenerateLattice(format!(
            "{k} generators cannot span rank {n}"
        )));
    }
    let mut w = m.clone();
    let mut u = IntMatrix::identity(k);
    for i in 0..n {
        for j in i + 1..k {
            if w.get(i, j).is_zero() {
                continue;
            }
            let a = w.get(i, i).clone();
            let b = w.get(i, j).clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let nb = -(&b / &g);
            let na = &a / &g;
            w.combine_cols(i, j, &s, &t, &nb, &na);
            u.combine_cols(i, j, &s, &t, &nb, &na);
        }
        if w.get(i, i).is_zero() {
            return Err(Error::DegenerateLattice(format!(
                "generators have rank < {n}"
            )));
        }
        if w.get(i, i).is_negative() {
            w.negate_col(i);
            u.negate_col(i);
        }
        let pivot = w.get(i, i).clone();
        for j in 0..i {
            let q = w.get(i, j).div_floor(&pivot);
            if !q.is_zero() {
                let nq = -q;
                w.add_col_multiple(j, i, &nq);
                u.add_col_multiple(j, i, &nq);
            }
        }
    }
    Ok(ColumnHnf {
        hnf: w.column_block(0..n),
        transform: u,
    })
}

/// The `hnf` block of [`column_hnf`] without the transform. Runs in machine
/// integers when every intermediate fits and falls back to big integers otherwise.
pub fn hnf_basis(m: &IntMatrix) -> Result<IntMatrix> {
    if let Some(h) = small_hnf(m) {
        return h;
    }
    Ok(column_hnf(m)?.hnf)
}

fn small_ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1, mut s0, mut s1, mut t0, mut t1) = (a, b, 1i64, 0i64, 0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// `None` on overflow, so the caller can redo the work exactly.
fn small_hnf(m: &IntMatrix) -> Option<Result<IntMatrix>> {
    const LIMIT: i64 = 1 << 40;
    let (n, k) = (m.rows, m.cols);
    if k < n {
        return Some(Err(Error::DegenerateLattice(format!(
            "{k} generators cannot span rank {n}"
        ))));
    }
    let mut w: Vec<i64> = Vec::with_capacity(n * k);
    for x in &m.data {
        let v = x.to_i64()?;
        if v.abs() > LIMIT {
            return None;
        }
        w.push(v);
    }
    let at = |r: usize, c: usize| r * k + c;
    for i in 0..n {
        for j in i + 1..k {
            let b = w[at(i, j)];
            if b == 0 {
                continue;
            }
            let a = w[at(i, i)];
            let (g, s, t) = small_ext_gcd(a, b);
            let (nb, na) = (-(b / g), a / g);
            for r in 0..n {
                let (x, y) = (w[at(r, i)], w[at(r, j)]);
                let ni = s.checked_mul(x)?.checked_add(t.checked_mul(y)?)?;
                let nj = nb.checked_mul(x)?.checked_add(na.checked_mul(y)?)?;
                if ni.abs() > LIMIT || nj.abs() > LIMIT {
                    return None;
                }
                w[at(r, i)] = ni;
                w[at(r, j)] = nj;
            }
        }
        if w[at(i, i)] == 0 {
            return Some(Err(Error::DegenerateLattice(format!(
                "generators have rank < {n}"
            ))));
        }
        if w[at(i, i)] < 0 {
            for r in 0..n {
                w[at(r, i)] = -w[at(r, i)];
            }
        }
        let pivot = w[at(i, i)];
        for j in 0..i {
            let q = w[at(i, j)].div_euclid(pivot);
            if q != 0 {
                for r in 0..n {
                    let v = w[at(r, j)].checked_sub(q.checked_mul(w[at(r, i)])?)?;
                    if v.abs() > LIMIT {
                        return None;
                    }
                    w[at(r, j)] = v;
                }
            }
        }
    }
    let mut h = IntMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            h.set(r, c, Int::from(w[at(r, c)]));
        }
    }
    Some(Ok(h))
}

/// Smith normal form `M = U * S * V` with `S = P * M * Q`, `P = U^-1`, `Q = V^-1`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl Snf {
    /// Diagonal entries `d1 | d2 | ...`, zeros last.
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

pub fn snf(m: &IntMatrix) -> Snf {
    let r = m.rows;
    let c = m.cols;
    let mut cur = m.clone();
    let mut p = IntMatrix::identity(r);
    let mut u = IntMatrix::identity(r);
    let mut q = IntMatrix::identity(c);
    let mut v = IntMatrix::identity(c);

    // Each helper keeps U*cur*V == M and P*M*Q == cur.
    let row_add = |cur: &mut IntMatrix, p: &mut IntMatrix, u: &mut IntMatrix, dst, src, k: &Int| {
        cur.add_row_multiple(dst, src, k);
        p.add_row_multiple(dst, src, k);
        let nk = -k;
        u.add_col_multiple(src, dst, &nk);
    };
    let col_add = |cur: &mut IntMatrix, q: &mut IntMatrix, v: &mut IntMatrix, dst, src, k: &Int| {
        cur.add_col_multiple(dst, src, k);
        q.add_col_multiple(dst, src, k);
        let nk = -k;
        v.add_row_multiple(src, dst, &nk);
    };

    for t in 0..r.min(c) {
        loop {
            // smallest nonzero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = cur.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if cur.get(bi, bj).abs() <= x.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish(cur, u, v, p, q);
            };
            cur.swap_rows(t, bi);
            p.swap_rows(t, bi);
            u.swap_cols(t, bi);
            cur.swap_cols(t, bj);
            q.swap_cols(t, bj);
            v.swap_rows(t, bj);

            let pivot = cur.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let k = cur.get(i, t).div_floor(&pivot);
                if !k.is_zero() {
                    row_add(&mut cur, &mut p, &mut u, i, t, &(-k));
                }
                if !cur.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let k = cur.get(t, j).div_floor(&pivot);
                if !k.is_zero() {
                    col_add(&mut cur, &mut q, &mut v, j, t, &(-k));
                }
                if !cur.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !cur.get(i, j).is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => row_add(&mut cur, &mut p, &mut u, t, i, &Int::one()),
                None => break,
            }
        }
        if cur.get(t, t).is_negative() {
            cur.negate_row(t);
            p.negate_row(t);
            u.negate_col(t);
        }
    }
    finish(cur, u, v, p, q)
}

fn finish(s: IntMatrix, u: IntMatrix, v: IntMatrix, p: IntMatrix, q: IntMatrix) -> Snf {
    Snf { u, s, v, p, q }
}
