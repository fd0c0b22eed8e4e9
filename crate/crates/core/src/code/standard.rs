//! Symplectic standard form `U A Uᵀ = J₂ ⊗ D` by integer congruence, and
//! the equivalence/normal-form machinery built on it.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GkpCode;
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, IntMat};
use crate::lattice::{symplectic_form, GeneratorMatrix};

#[derive(Clone, Debug)]
pub struct StandardForm {
    /// Unimodular change of basis.
    pub u: ExactMatrix,
    /// Positive, non-increasing; `D₁₁ ≥ D₂₂ ≥ …`.
    pub d: Vec<u64>,
    /// `U·M`.
    pub basis: GeneratorMatrix,
}

/// Data returned when two codes are symplectically equivalent.
#[derive(Clone, Debug)]
pub struct Equivalence {
    /// Symplectic `R` with `M_std = N_std·Rᵀ`.
    pub r: DMatrix<f64>,
    pub d: Vec<u64>,
    /// `φ_{N Rᵀ}` evaluated on the rows of `M_std`.
    pub phases: Vec<f64>,
}

/// Congruence workspace: basis rows `u` and Gram `a = u A uᵀ`.
struct Work {
    a: IntMat,
    u: IntMat,
}

impl Work {
    /// `b_k ← b_k + α b_p`
    fn add(&mut self, k: usize, p: usize, alpha: &BigInt) {
        if alpha.is_zero() {
            return;
        }
        let n = self.a.len();
        for j in 0..n {
            let t = &self.u[p][j] * alpha;
            self.u[k][j] += t;
        }
        for j in 0..n {
            let t = &self.a[p][j] * alpha;
            self.a[k][j] += t;
        }
        for i in 0..n {
            let t = &self.a[i][p] * alpha;
            self.a[i][k] += t;
        }
    }
}

fn already_standard(a: &[Vec<i64>]) -> Option<Vec<u64>> {
    let n = a.len() / 2;
    let mut d = Vec::with_capacity(n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            let want = if j == i + n && i < n {
                a[i][j]
            } else if i == j + n && j < n {
                -a[j][i]
            } else {
                0
            };
            if a[i][j] != want {
                return None;
            }
        }
    }
    for i in 0..n {
        if a[i][n + i] <= 0 || (i > 0 && a[i - 1][n + i - 1] % a[i][n + i] != 0) {
            return None;
        }
        d.push(a[i][n + i] as u64);
    }
    Some(d)
}

/// Unimodular `U` and `D` with `U A Uᵀ = [[0, D], [−D, 0]]`.
pub(crate) fn antisymmetric_standard_form(a: &[Vec<i64>]) -> Result<(IntMat, Vec<u64>)> {
    let dim = a.len();
    if dim % 2 != 0 {
        return Err(Error::InvalidArgument("antisymmetric form of odd size".into()));
    }
    let n = dim / 2;
    if let Some(d) = already_standard(a) {
        let id = (0..dim).map(|i| (0..dim).map(|j| BigInt::from(u8::from(i == j))).collect()).collect();
        return Ok((id, d));
    }
    let mut w = Work {
        a: a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        u: (0..dim).map(|i| (0..dim).map(|j| BigInt::from(u8::from(i == j))).collect()).collect(),
    };
    let mut active: Vec<usize> = (0..dim).collect();
    let mut pairs: Vec<(usize, usize, BigInt)> = Vec::with_capacity(n);
    while !active.is_empty() {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for &p in &active {
                for &q in &active {
                    if p == q || w.a[p][q].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bp, bq)| w.a[p][q].abs() < w.a[bp][bq].abs()) {
                        best = Some((p, q));
                    }
                }
            }
            let (mut p, mut q) = best.ok_or(Error::SingularMatrix)?;
            if w.a[p][q].is_negative() {
                std::mem::swap(&mut p, &mut q);
            }
            let delta = w.a[p][q].clone();
            let mut clean = true;
            for &k in &active {
                if k == p || k == q {
                    continue;
                }
                let alpha = -w.a[k][q].div_floor(&delta);
                w.add(k, p, &alpha);
                let beta = w.a[k][p].div_floor(&delta);
                w.add(k, q, &beta);
                clean &= w.a[k][p].is_zero() && w.a[k][q].is_zero();
            }
            if !clean {
                continue;
            }
            let rest: Vec<usize> = active.iter().copied().filter(|&k| k != p && k != q).collect();
            let bad = rest.iter().find(|&&k| rest.iter().any(|&l| !(&w.a[k][l] % &delta).is_zero()));
            if let Some(&k) = bad {
                // b_p ← b_p + b_k exposes a remainder smaller than delta.
                w.add(p, k, &BigInt::one());
                continue;
            }
            pairs.push((p, q, delta));
            active = rest;
            break;
        }
    }
    pairs.sort_by(|x, y| y.2.cmp(&x.2));
    let mut u: IntMat = Vec::with_capacity(dim);
    for (p, _, _) in &pairs {
        u.push(w.u[*p].clone());
    }
    for (_, q, _) in &pairs {
        u.push(w.u[*q].clone());
    }
    let d = pairs
        .iter()
        .map(|x| x.2.to_u64().ok_or_else(|| Error::InvalidArgument("standard-form entry exceeds u64".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok((u, d))
}

fn strictly_lower_parity(a: &[Vec<i64>], x: &[BigInt]) -> u8 {
    let mut acc = BigInt::zero();
    for i in 0..x.len() {
        for j in 0..i {
            if a[i][j] != 0 {
                acc += &x[i] * BigInt::from(a[i][j]) * &x[j];
            }
        }
    }
    if acc.is_odd() {
        1
    } else {
        0
    }
}

impl GkpCode {
    /// Standard form `(U M) J (U M)ᵀ = J₂ ⊗ D`.
    pub fn standard_form(&self) -> Result<StandardForm> {
        let (u, d) = antisymmetric_standard_form(self.symplectic_gram_i64())?;
        let u = ExactMatrix::from_int_rows(&u);
        let basis = self.generator().rebased(&u)?;
        Ok(StandardForm { u, d, basis })
    }

    /// Symplectic `R` relating the two codes when their `D` agree.
    pub fn symplectically_equivalent(&self, other: &GkpCode) -> Result<Option<Equivalence>> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::DimensionMismatch { expected: 2 * self.n_modes(), got: 2 * other.n_modes() });
        }
        let sm = self.standard_form()?;
        let sn = other.standard_form()?;
        if sm.d != sn.d {
            return Ok(None);
        }
        let n = self.n_modes();
        let z = DMatrix::from_fn(2 * n, 2 * n, |i, j| if i == j { 1.0 / (sm.d[i % n] as f64).sqrt() } else { 0.0 });
        let m_t = &z * sm.basis.matrix();
        let n_t = &z * sn.basis.matrix();
        let n_inv = n_t.try_inverse().ok_or(Error::SingularMatrix)?;
        let rt = n_inv * m_t;
        let un = sn.u.to_int_rows()?;
        let phases = un
            .iter()
            .map(|row| {
                if strictly_lower_parity(other.symplectic_gram_i64(), row) == 1 {
                    std::f64::consts::PI
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Some(Equivalence { r: rt.transpose(), d: sm.d, phases }))
    }

    /// The diagonal code `⊕ⱼ √Dⱼⱼ I₂` with the same `D`.
    pub fn normal_form_code(&self) -> Result<GkpCode> {
        let d = self.standard_form()?.d;
        let n = d.len();
        let name = format!("{}-normal", self.name());
        // Exact when every Dⱼ shares the same square-free part f: √Dⱼ = sⱼ·f/√f.
        let parts: Vec<(u64, u64)> = d.iter().map(|&x| square_free_split(x)).collect();
        let f = parts[0].1;
        let m = if parts.iter().all(|p| p.1 == f) {
            let rows: Vec<Vec<i64>> = (0..2 * n)
                .map(|i| (0..2 * n).map(|j| if i == j { (parts[i % n].0 * f) as i64 } else { 0 }).collect())
                .collect();
            GeneratorMatrix::from_int_rows(&rows, f)?
        } else {
            GeneratorMatrix::new(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
                if i == j {
                    (d[i % n] as f64).sqrt()
                } else {
                    0.0
                }
            }))?
        };
        GkpCode::validate(name, m)
    }

    /// `(max D)^{-1/2} · sq(R)` with `R` from the equivalence to the normal
    /// form. Certified only for this particular `R`.
    pub fn squeezing_bound(&self) -> Result<f64> {
        let nf = self.normal_form_code()?;
        let eq = self
            .symplectically_equivalent(&nf)?
            .ok_or_else(|| Error::InvalidArgument("normal form has a different D".into()))?;
        let dmax = *eq.d.iter().max().expect("n ≥ 1") as f64;
        let sv = eq.r.clone().singular_values();
        let smax = sv.iter().copied().fold(0.0, f64::max);
        Ok(smax / dmax.sqrt())
    }
}

/// `x = s²·f` with `f` square-free.
fn square_free_split(mut x: u64) -> (u64, u64) {
    let mut s = 1;
    let mut f = 1;
    let mut p = 2;
    while p * p <= x {
        while x % (p * p) == 0 {
            x /= p * p;
            s *= p;
        }
        if x % p == 0 {
            x /= p;
            f *= p;
        }
        p += 1;
    }
    (s, f * x)
}

/// `‖RᵀJR − J‖_max`.
pub fn symplectic_defect(r: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(r.nrows() / 2);
    (r.transpose() * &j * r - j).abs().max()
}
