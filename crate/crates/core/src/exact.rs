//! Exact integer/rational matrix arithmetic: Hermite and Smith normal forms,
//! fraction-free determinants and canonical residues modulo a row lattice.
//!
//! Matrices here are small (at most a few dozen rows), so the algorithms are
//! the plain textbook ones over arbitrary-precision integers.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Row-major integer matrix used by the internal algorithms.
pub(crate) type IntMat = Vec<Vec<BigInt>>;

/// Dense matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "ExactMatrix needs at least one row and column");
        ExactMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Build from rows of machine integers. Panics on ragged input.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let int: IntMat = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_int_rows(&int)
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, BigRational::from_integer(x.clone()));
            }
        }
        m
    }

    pub fn from_rational_rows(rows: &[Vec<BigRational>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Integer rows, or `NonIntegerInput` naming the first offending entry.
    pub fn to_int_rows(&self) -> Result<IntMat> {
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = Vec::with_capacity(self.cols);
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_integer() {
                    return Err(Error::NonIntegerInput { row: i, col: j });
                }
                row.push(x.to_integer());
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Entries as `i64`, if integral and in range.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = self.get(i, j);
                        if x.is_integer() { x.to_integer().to_i64() } else { None }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Exact inverse by Gauss–Jordan elimination over the rationals.
    pub fn inverse(&self) -> Result<ExactMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| self.row(i)).collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &a[col][j] * &f;
                    a[r][j] -= t;
                    let t = &inv[col][j] * &f;
                    inv[r][j] -= t;
                }
            }
        }
        Ok(Self::from_rational_rows(&inv))
    }
}

/// Result of [`hnf`]: `h = u · m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    pub h: ExactMatrix,
    pub u: ExactMatrix,
    /// Number of nonzero rows of `h`.
    pub rank: usize,
}

/// `U·A·V = S` with `S` diagonal and `s₁ | s₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: ExactMatrix,
    pub v: ExactMatrix,
    pub s: ExactMatrix,
}

impl SmithDecomposition {
    /// The diagonal `s₁, s₂, …` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).to_integer()).collect()
    }
}

fn int_identity(n: usize) -> IntMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// `rows[dst] -= q * rows[src]`
fn row_axpy(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (a, b) = m.split_at_mut(src);
        (&mut a[dst], &b[0])
    } else {
        let (a, b) = m.split_at_mut(dst);
        (&mut b[0], &a[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(m: &mut IntMat, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn negate_row(m: &mut IntMat, i: usize) {
    for x in m[i].iter_mut() {
        *x = -x.clone();
    }
}

/// Row-style Hermite normal form of an integer matrix.
pub(crate) fn int_hnf(m: &IntMat) -> (IntMat, IntMat, usize) {
    let r = m.len();
    let c = m.first().map_or(0, Vec::len);
    let mut h = m.clone();
    let mut u = int_identity(r);
    let mut pr = 0;
    for col in 0..c {
        if pr == r {
            break;
        }
        loop {
            let piv = (pr..r).filter(|&i| !h[i][col].is_zero()).min_by_key(|&i| h[i][col].abs());
            let Some(p) = piv else { break };
            h.swap(pr, p);
            u.swap(pr, p);
            let mut clean = true;
            for i in pr + 1..r {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = h[i][col].div_floor(&h[pr][col]);
                row_axpy(&mut h, i, pr, &q);
                row_axpy(&mut u, i, pr, &q);
                if !h[i][col].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[pr][col].is_zero() {
            continue;
        }
        if h[pr][col].is_negative() {
            negate_row(&mut h, pr);
            negate_row(&mut u, pr);
        }
        for i in 0..pr {
            let q = h[i][col].div_floor(&h[pr][col]);
            row_axpy(&mut h, i, pr, &q);
            row_axpy(&mut u, i, pr, &q);
        }
        pr += 1;
    }
    (h, u, pr)
}

/// Hermite normal form `h = u·m`: upper triangular, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`, zero rows at the bottom.
pub fn hnf(m: &ExactMatrix) -> Result<Hnf> {
    let int = m.to_int_rows()?;
    let (h, u, rank) = int_hnf(&int);
    Ok(Hnf { h: ExactMatrix::from_int_rows(&h), u: ExactMatrix::from_int_rows(&u), rank })
}

/// Smith normal form with unimodular transforms.
pub fn smith(a: &ExactMatrix) -> Result<SmithDecomposition> {
    let mut m = a.to_int_rows()?;
    let r = m.len();
    let c = m[0].len();
    let mut u = int_identity(r);
    let mut v = int_identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Ok(finish_smith(m, u, v));
            };
            m.swap(t, pi);
            u.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..r {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..c {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(&m[i][j] % &m[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    // Pull the offending row up; the next pass produces a smaller pivot.
                    let minus_one = -BigInt::one();
                    row_axpy(&mut m, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            negate_row(&mut m, t);
            negate_row(&mut u, t);
        }
    }
    Ok(finish_smith(m, u, v))
}

fn finish_smith(s: IntMat, u: IntMat, v: IntMat) -> SmithDecomposition {
    SmithDecomposition {
        u: ExactMatrix::from_int_rows(&u),
        v: ExactMatrix::from_int_rows(&v),
        s: ExactMatrix::from_int_rows(&s),
    }
}

/// Bareiss fraction-free determinant of a square integer matrix.
pub(crate) fn int_det(m: &IntMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact determinant. Rows are cleared of denominators first so the
/// elimination itself stays fraction-free.
pub fn det_exact(m: &ExactMatrix) -> Result<BigRational> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    let mut scale = BigInt::one();
    let mut int = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m.row(i);
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        int.push(row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect());
        scale *= l;
    }
    Ok(BigRational::new(int_det(&int), scale))
}

/// Canonical representative of `v` modulo the row lattice of `h` (which must
/// be in Hermite normal form). The result is zero iff `v` lies in the span.
pub fn residue_reduce(v: &[BigInt], h: &ExactMatrix) -> Result<Vec<BigInt>> {
    if v.len() != h.cols() {
        return Err(Error::DimensionMismatch { expected: h.cols(), got: v.len() });
    }
    let rows = h.to_int_rows()?;
    Ok(int_residue(v, &rows))
}

pub(crate) fn int_residue(v: &[BigInt], h: &IntMat) -> Vec<BigInt> {
    let mut r = v.to_vec();
    for row in h {
        let Some(j) = row.iter().position(|x| !x.is_zero()) else { continue };
        let q = r[j].div_floor(&row[j]);
        if q.is_zero() {
            continue;
        }
        for (x, y) in r.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    r
}
