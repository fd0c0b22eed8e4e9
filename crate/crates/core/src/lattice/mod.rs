//! Real lattices given by a generator matrix whose rows are the basis vectors.
//!
//! Vectors of phase space use the `(q₁…q_n, p₁…p_n)` ordering throughout,
//! with `J = [[0, I], [-I, 0]]`. Converters to the interleaved ordering
//! `(q₁, p₁, q₂, p₂, …)` live at the bottom of this module.

mod enumerate;
mod lll;
mod minima;

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, ExactMatrix, IntMat};

pub use enumerate::{ClosestVector, EnumOptions, LatticeSearch, ShortVector, ShortVectorList, DEFAULT_CAP};
pub use lll::DEFAULT_DELTA;

/// Relative tolerance on rounded coefficients in floating membership tests.
pub const MEMBER_TOL: f64 = 1e-9;

/// Integer form of a generator: `matrix = b / √c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactForm {
    pub b: ExactMatrix,
    pub c: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualKind {
    /// `M* = M^{-T}`
    Euclidean,
    /// `M⊥ = M^{-T} Jᵀ`
    Symplectic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MemberMode {
    Exact,
    Float,
    /// Exact when the generator carries an exact form, float otherwise.
    #[default]
    Auto,
}

/// Full-rank square lattice basis (rows are basis vectors).
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
    exact: Option<ExactForm>,
    hnf: OnceLock<Option<IntMat>>,
    search: OnceLock<Arc<LatticeSearch>>,
}

impl PartialEq for GeneratorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.exact == other.exact
    }
}

/// The standard symplectic form on `R^{2n}` in `qqpp` ordering.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

pub(crate) fn symplectic_form_int(n: usize) -> IntMat {
    let mut j = vec![vec![BigInt::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = BigInt::one();
        j[n + i][i] = -BigInt::one();
    }
    j
}

fn int_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![BigInt::zero(); c]; r];
    for i in 0..r {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

fn int_transpose(a: &IntMat) -> IntMat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

fn isqrt(c: u64) -> u64 {
    let mut s = (c as f64).sqrt() as u64;
    while s * s > c {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= c {
        s += 1;
    }
    s
}

/// Remove a common factor `s` from `B` when `s²` divides `c`.
fn simplify_exact(b: IntMat, c: u64) -> (IntMat, u64) {
    let g = b.iter().flatten().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let g = g.to_u64().unwrap_or(1).max(1);
    let mut best = 1;
    for s in 2..=isqrt(c).min(g) {
        if g % s == 0 && c % (s * s) == 0 {
            best = s;
        }
    }
    if best == 1 {
        return (b, c);
    }
    let s = BigInt::from(best);
    (b.into_iter().map(|r| r.into_iter().map(|x| x / &s).collect()).collect(), c / (best * best))
}

impl GeneratorMatrix {
    /// Wrap a real basis, rejecting non-square or rank-deficient input.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::build(matrix, None)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::new(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Basis `b / √c` with `b` integral.
    pub fn from_exact(b: ExactMatrix, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidArgument("exact form needs c > 0".into()));
        }
        let (int, c) = simplify_exact(b.to_int_rows()?, c);
        let b = ExactMatrix::from_int_rows(&int);
        if !b.is_square() {
            return Err(Error::NonSquare { rows: b.rows(), cols: b.cols() });
        }
        if exact::int_det(&int).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let s = (c as f64).sqrt();
        let matrix = b.to_f64().map(|x| x / s);
        Self::build(matrix, Some(ExactForm { b, c }))
    }

    pub fn from_int_rows(rows: &[Vec<i64>], c: u64) -> Result<Self> {
        Self::from_exact(ExactMatrix::from_i64_rows(rows), c)
    }

    fn build(matrix: DMatrix<f64>, exact: Option<ExactForm>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 {
            return Err(Error::NonSquare { rows: r, cols: c });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        if exact.is_none() {
            let scale: f64 = matrix.row_iter().map(|row| row.norm()).product();
            let det = matrix.clone().lu().determinant();
            if scale == 0.0 || det.abs() <= 1e-12 * scale {
                return Err(Error::SingularMatrix);
            }
        }
        let inverse = matrix.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        Ok(GeneratorMatrix { matrix, inverse, exact, hnf: OnceLock::new(), search: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of modes `n` for a `2n`-dimensional phase-space lattice.
    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn exact(&self) -> Option<&ExactForm> {
        self.exact.as_ref()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.matrix.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.row(i)).collect()
    }

    /// Largest Euclidean row norm (the `C` of the Hadamard bound).
    pub fn max_row_norm(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// `|det M|`, computed exactly when possible.
    pub fn abs_det(&self) -> f64 {
        match &self.exact {
            Some(e) => {
                let d = exact::det_exact(&e.b).expect("square by construction");
                d.abs().to_f64().unwrap_or(f64::NAN) / (e.c as f64).powf(self.dim() as f64 / 2.0)
            }
            None => self.matrix.clone().lu().determinant().abs(),
        }
    }

    /// Euclidean Gram matrix `M Mᵀ`.
    pub fn gram(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }

    /// Symplectic Gram matrix `M J Mᵀ` (even dimension only).
    pub fn symplectic_gram(&self) -> Result<DMatrix<f64>> {
        if self.dim() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("odd dimension {} has no symplectic form", self.dim())));
        }
        Ok(&self.matrix * symplectic_form(self.n_modes()) * self.matrix.transpose())
    }

    /// Exact `M J Mᵀ` as a rational matrix, when the exact form exists.
    pub fn symplectic_gram_exact(&self) -> Option<ExactMatrix> {
        let e = self.exact.as_ref()?;
        if self.dim() % 2 != 0 {
            return None;
        }
        let b = e.b.to_int_rows().ok()?;
        let a = int_mul(&int_mul(&b, &symplectic_form_int(self.n_modes())), &int_transpose(&b));
        let c = BigRational::from_integer(BigInt::from(e.c));
        Some(ExactMatrix::from_int_rows(&a).scale(&c.recip()))
    }

    /// Multiply the lattice by `√λ`, keeping the exact form.
    pub fn scaled_sqrt(&self, lambda: u64) -> Result<Self> {
        match &self.exact {
            Some(e) => {
                let l = BigRational::from_integer(BigInt::from(lambda));
                Self::from_exact(e.b.scale(&l), e.c * lambda)
            }
            None => Self::new(&self.matrix * (lambda as f64).sqrt()),
        }
    }

    /// Multiply every entry by `s` (drops the exact form).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(&self.matrix * s)
    }

    /// Right-multiply by a real matrix, i.e. apply `x ↦ x·S` to every vector.
    pub fn transformed(&self, s: &DMatrix<f64>) -> Result<Self> {
        Self::new(&self.matrix * s)
    }

    /// `U·M` for an integer change of basis; keeps the exact form.
    pub fn rebased(&self, u: &ExactMatrix) -> Result<Self> {
        match &self.exact {
            Some(e) => Self::from_exact(u.mul(&e.b)?, e.c),
            None => Self::new(u.to_f64() * &self.matrix),
        }
    }

    /// Dual basis (euclidean `M^{-T}` or symplectic `M^{-T}Jᵀ`).
    pub fn dual(&self, kind: DualKind) -> Result<Self> {
        let jt = || symplectic_form(self.n_modes()).transpose();
        if kind == DualKind::Symplectic && self.dim() % 2 != 0 {
            return Err(Error::InvalidArgument("symplectic dual needs even dimension".into()));
        }
        if let Some(e) = &self.exact {
            // M^{-T} = √c·B^{-T} = (N/k)·√c = N·c / √(c k²)
            let inv_t = e.b.inverse()?.transpose();
            let k = (0..inv_t.rows())
                .flat_map(|i| inv_t.row(i))
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let mut n = inv_t.scale(&BigRational::from_integer(k.clone())).to_int_rows()?;
            if kind == DualKind::Symplectic {
                n = int_mul(&n, &int_transpose(&symplectic_form_int(self.n_modes())));
            }
            let c = BigInt::from(e.c);
            let scaled: IntMat = n.into_iter().map(|r| r.into_iter().map(|x| x * &c).collect()).collect();
            let new_c = (&c * &k * &k).to_u64().ok_or_else(|| Error::InvalidArgument("dual denominator overflow".into()))?;
            return Self::from_exact(ExactMatrix::from_int_rows(&scaled), new_c);
        }
        let inv_t = self.inverse.transpose();
        let m = match kind {
            DualKind::Euclidean => inv_t,
            DualKind::Symplectic => inv_t * jt(),
        };
        Self::new(m)
    }

    /// Real coefficients `a` with `x = a·M`.
    pub fn coefficients(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.inverse.transpose() * DVector::from_column_slice(x))
    }

    /// Integer coefficients of `x` if `x ∈ L` within the relative tolerance `tol`.
    pub fn integer_coefficients(&self, x: &[f64], tol: f64) -> Result<Option<Vec<i64>>> {
        let a = self.coefficients(x)?;
        let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut out = Vec::with_capacity(a.len());
        for v in a.iter() {
            let r = v.round();
            if (v - r).abs() > tol * scale {
                return Ok(None);
            }
            out.push(r as i64);
        }
        Ok(Some(out))
    }

    /// `a·M` for integer coefficients.
    pub fn combine(&self, a: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += ai as f64 * self.matrix[(i, j)];
            }
        }
        out
    }

    /// Hermite normal form of the integer matrix `B` (exact form only).
    pub fn exact_hnf(&self) -> Option<ExactMatrix> {
        self.hnf_rows().map(|h| ExactMatrix::from_int_rows(h))
    }

    fn hnf_rows(&self) -> Option<&IntMat> {
        self.hnf
            .get_or_init(|| {
                let e = self.exact.as_ref()?;
                let b = e.b.to_int_rows().ok()?;
                Some(exact::int_hnf(&b).0)
            })
            .as_ref()
    }

    /// Exact membership of `x / √c` (with the generator's own `c`).
    pub fn member_exact(&self, x: &[BigInt]) -> Result<bool> {
        let h = self.hnf_rows().ok_or(Error::NoExactForm)?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(exact::int_residue(x, h).iter().all(Zero::is_zero))
    }

    /// Is `x` a lattice vector?
    pub fn member(&self, x: &[f64], mode: MemberMode) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let use_exact = match mode {
            MemberMode::Exact => {
                if self.exact.is_none() {
                    return Err(Error::NoExactForm);
                }
                true
            }
            MemberMode::Float => false,
            MemberMode::Auto => self.exact.is_some(),
        };
        if use_exact {
            let s = (self.exact.as_ref().expect("checked").c as f64).sqrt();
            let mut ints = Vec::with_capacity(x.len());
            for &v in x {
                let y = v * s;
                let r = y.round();
                if (y - r).abs() > MEMBER_TOL * y.abs().max(1.0) {
                    return Ok(false);
                }
                ints.push(BigInt::from(r as i64));
            }
            return self.member_exact(&ints);
        }
        Ok(self.integer_coefficients(x, MEMBER_TOL)?.is_some())
    }

    /// Babai rounding: `round(x M^{-1}) · M`.
    pub fn babai_round(&self, x: &[f64]) -> Result<Vec<f64>> {
        let a = self.coefficients(x)?;
        let coeffs: Vec<i64> = a.iter().map(|v| v.round() as i64).collect();
        Ok(self.combine(&coeffs))
    }

    /// LLL-reduced basis of the same lattice.
    pub fn lll_reduce(&self, delta: f64) -> Result<Self> {
        Ok(self.lll_reduce_with_transform(delta)?.0)
    }

    /// LLL reduction together with the unimodular `T` such that the result is `T·M`.
    pub fn lll_reduce_with_transform(&self, delta: f64) -> Result<(Self, Vec<Vec<i64>>)> {
        if !(0.25 < delta && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("LLL delta {delta} outside (1/4, 1)")));
        }
        let t = lll::lll_transform(&self.matrix, delta);
        let u = ExactMatrix::from_i64_rows(&t);
        let reduced = match &self.exact {
            Some(_) => self.rebased(&u)?,
            None => {
                let tf = DMatrix::from_fn(self.dim(), self.dim(), |i, j| t[i][j] as f64);
                Self::new(tf * &self.matrix)?
            }
        };
        Ok((reduced, t))
    }

    /// Basis suited to Babai rounding. Rounding fails once a coefficient of
    /// `xM⁻¹` leaves `[−½, ½)`, so what matters are the columns of `M⁻¹`:
    /// LLL-reduce the euclidean dual `M^{-T}` to `T·M^{-T}` and return
    /// `T^{-T}·M`, a basis of the same lattice.
    pub fn rounding_reduced(&self, delta: f64) -> Result<Self> {
        let dual = Self::new(self.inverse().transpose())?;
        let (_, t) = dual.lll_reduce_with_transform(delta)?;
        let u = ExactMatrix::from_i64_rows(&t).inverse()?.transpose();
        self.rebased(&u)
    }

    /// Shared search context (LLL reduction + Gram–Schmidt data), built once.
    pub fn search(&self) -> &LatticeSearch {
        self.search.get_or_init(|| Arc::new(LatticeSearch::new(self)))
    }

    /// All lattice vectors `x` with `‖x − center‖² ≤ radius2`, sorted.
    pub fn enumerate_short_vectors(
        &self,
        radius2: f64,
        center: Option<&[f64]>,
        opts: &EnumOptions,
    ) -> Result<ShortVectorList> {
        self.search().enumerate(radius2, center, opts)
    }

    /// Exact closest lattice vector to `x`.
    pub fn closest_vector(&self, x: &[f64], opts: &EnumOptions) -> Result<ClosestVector> {
        self.search().closest(x, opts)
    }

    /// The first `dim` successive minima.
    pub fn successive_minima(&self, opts: &EnumOptions) -> Result<Vec<f64>> {
        minima::successive_minima(self, opts)
    }

    /// Same lattice generated by both bases (HNF equality when both exact
    /// with the same denominator, otherwise mutual float membership).
    pub fn same_lattice(&self, other: &Self) -> Result<bool> {
        if self.dim() != other.dim() {
            return Ok(false);
        }
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            if a.c == b.c {
                return Ok(self.hnf_rows() == other.hnf_rows());
            }
        }
        for r in self.rows() {
            if !other.member(&r, MemberMode::Float)? {
                return Ok(false);
            }
        }
        for r in other.rows() {
            if !self.member(&r, MemberMode::Float)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Columns permuted from `qqpp` to interleaved ordering.
    pub fn to_interleaved(&self) -> Result<Self> {
        self.permute_columns(&qqpp_to_interleaved_perm(self.n_modes()))
    }

    /// Columns permuted from interleaved to `qqpp` ordering.
    pub fn from_interleaved(&self) -> Result<Self> {
        self.permute_columns(&interleaved_to_qqpp_perm(self.n_modes()))
    }

    /// New matrix whose column `j` is old column `perm[j]`.
    fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        match &self.exact {
            Some(e) => {
                let mut b = ExactMatrix::zeros(d, d);
                for i in 0..d {
                    for (j, &p) in perm.iter().enumerate() {
                        b.set(i, j, e.b.get(i, p).clone());
                    }
                }
                Self::from_exact(b, e.c)
            }
            None => Self::new(DMatrix::from_fn(d, d, |i, j| self.matrix[(i, perm[j])])),
        }
    }
}

/// `perm[j]` = `qqpp` index feeding interleaved position `j`.
fn qqpp_to_interleaved_perm(n: usize) -> Vec<usize> {
    (0..2 * n).map(|j| if j % 2 == 0 { j / 2 } else { n + j / 2 }).collect()
}

fn interleaved_to_qqpp_perm(n: usize) -> Vec<usize> {
    (0..2 * n).map(|j| if j < n { 2 * j } else { 2 * (j - n) + 1 }).collect()
}

/// `(q₁…q_n, p₁…p_n)` → `(q₁, p₁, …, q_n, p_n)`.
pub fn qqpp_to_interleaved(v: &[f64]) -> Vec<f64> {
    qqpp_to_interleaved_perm(v.len() / 2).iter().map(|&i| v[i]).collect()
}

/// `(q₁, p₁, …, q_n, p_n)` → `(q₁…q_n, p₁…p_n)`.
pub fn interleaved_to_qqpp(v: &[f64]) -> Vec<f64> {
    interleaved_to_qqpp_perm(v.len() / 2).iter().map(|&i| v[i]).collect()
}

/// Symplectic product `x J yᵀ` in `qqpp` ordering.
pub fn symplectic_product(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2_i2() -> GeneratorMatrix {
        GeneratorMatrix::from_int_rows(&[vec![2, 0], vec![0, 2]], 2).unwrap()
    }

    fn hexagonal() -> GeneratorMatrix {
        let s = 3f64.powf(-0.25);
        GeneratorMatrix::from_rows(&[vec![2.0 * s, 0.0], vec![s, 3f64.sqrt() * s]]).unwrap()
    }

    #[test]
    fn gram_examples() {
        let g = sqrt2_i2().gram();
        assert!((g - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0])).abs().max() < 1e-12);
        let g = hexagonal().gram();
        let want = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 4.0]) / 3f64.sqrt();
        assert!((g - want).abs().max() < 1e-12);
    }

    #[test]
    fn exact_form_is_simplified() {
        let m = GeneratorMatrix::from_int_rows(&[vec![4, 0], vec![0, 4]], 8).unwrap();
        let e = m.exact().unwrap();
        assert_eq!(e.c, 2);
        assert_eq!(e.b, ExactMatrix::from_i64_rows(&[vec![2, 0], vec![0, 2]]));
    }

    #[test]
    fn symplectic_dual_of_square() {
        let d = sqrt2_i2().dual(DualKind::Symplectic).unwrap();
        let e = d.exact().unwrap();
        assert_eq!(e.c, 2);
        assert_eq!(e.b, ExactMatrix::from_i64_rows(&[vec![0, -1], vec![1, 0]]));
        let prod = d.matrix() * symplectic_form(1) * sqrt2_i2().matrix().transpose();
        assert!((prod - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn dual_is_an_involution() {
        for kind in [DualKind::Euclidean, DualKind::Symplectic] {
            let h = hexagonal();
            let back = h.dual(kind).unwrap().dual(kind).unwrap();
            assert!(back.same_lattice(&h).unwrap());
            let s = sqrt2_i2();
            let back = s.dual(kind).unwrap().dual(kind).unwrap();
            assert_eq!(back.exact_hnf(), s.exact_hnf());
        }
    }

    #[test]
    fn membership() {
        let s = sqrt2_i2();
        assert!(s.member(&s.row(0), MemberMode::Auto).unwrap());
        let x = [1.0 / 2f64.sqrt(), 0.0];
        assert!(!s.member(&x, MemberMode::Exact).unwrap());
        assert!(!s.member(&x, MemberMode::Float).unwrap());
        assert_eq!(hexagonal().member(&x, MemberMode::Exact), Err(Error::NoExactForm));
        assert!(s.member_exact(&[BigInt::from(2), BigInt::from(-4)]).unwrap());
        assert!(!s.member_exact(&[BigInt::from(1), BigInt::from(0)]).unwrap());
    }

    #[test]
    fn babai_examples() {
        let s = sqrt2_i2();
        let x = [0.6 * 2f64.sqrt(), 0.0];
        let r = s.babai_round(&x).unwrap();
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-12 && r[1].abs() < 1e-12);
        let v = s.row(1);
        assert_eq!(s.babai_round(&v).unwrap(), v);
    }

    #[test]
    fn babai_differs_from_cvp_on_skewed_basis() {
        let m = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.51, 0.1]]).unwrap();
        let x = [0.5, 0.0];
        let b = m.babai_round(&x).unwrap();
        let c = m.closest_vector(&x, &EnumOptions::default()).unwrap();
        let dist = |p: &[f64]| (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
        assert!(c.dist2 < dist(&b) - 1e-6, "babai {b:?} vs cvp {:?}", c.point);
    }

    #[test]
    fn lll_on_skewed_z2() {
        let m = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![100.0, 1.0]]).unwrap();
        let r = m.lll_reduce(DEFAULT_DELTA).unwrap();
        assert!(r.max_row_norm() <= 2f64.sqrt() + 1e-12);
        assert!(r.same_lattice(&m).unwrap());
    }

    #[test]
    fn ordering_roundtrip() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(qqpp_to_interleaved(&v), vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(interleaved_to_qqpp(&qqpp_to_interleaved(&v)), v.to_vec());
        let m = GeneratorMatrix::from_int_rows(&[vec![1, 2, 3, 4], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]], 1)
            .unwrap();
        assert_eq!(m.to_interleaved().unwrap().from_interleaved().unwrap(), m);
    }

    #[test]
    fn rejects_singular() {
        assert_eq!(GeneratorMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap_err(), Error::SingularMatrix);
        assert!(matches!(GeneratorMatrix::from_rows(&[vec![1.0, 1.0]]), Err(Error::NonSquare { .. })));
    }
}
