use super::{CosetSystem, GkpCode};
use crate::error::{Error, Result};
use crate::exact::{self, ExactMatrix};
use crate::lattice::{DualKind, EnumOptions, GeneratorMatrix, MemberMode, ShortVector};

/// Shortest nontrivial logical displacement.
#[derive(Clone, Debug, PartialEq)]
pub struct Distance {
    pub delta: f64,
    pub witness: Vec<f64>,
}

/// Shortest vector of `sup` rejected by `inside`, searched in shells whose
/// squared radius doubles from the shortest reduced basis vector.
pub(crate) fn shortest_outside(
    sup: &GeneratorMatrix,
    opts: &EnumOptions,
    inside: impl Fn(&ShortVector) -> Result<bool>,
) -> Result<Distance> {
    let search = sup.search();
    let mut r2 = search
        .reduced_basis()
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    loop {
        let list = sup.enumerate_short_vectors(r2, None, opts)?;
        for e in &list.entries {
            if e.coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            if !inside(e)? {
                return Ok(Distance { delta: e.norm2.sqrt(), witness: e.vector.clone() });
            }
        }
        r2 *= 2.0;
    }
}

impl GkpCode {
    /// Length of the shortest dual vector outside the stabilizer lattice.
    pub fn distance(&self) -> Result<Distance> {
        self.distance_with(&EnumOptions::default())
    }

    pub fn distance_with(&self, opts: &EnumOptions) -> Result<Distance> {
        if self.logical_dim() == 1 {
            return Err(Error::TrivialCode);
        }
        let cosets = self.cosets();
        shortest_outside(self.dual(), opts, |e| Ok(CosetSystem::is_zero(&cosets.label_of_coeffs(&e.coeffs))))
    }

    /// `(M_q, M_p)` when the lattice splits as `L_q ⊕ L_p` across the q/p
    /// blocks; detected on the Hermite normal form of the integer generator,
    /// or directly on a float basis whose rows already live in one block.
    pub fn css_split(&self) -> Result<Option<(GeneratorMatrix, GeneratorMatrix)>> {
        let n = self.n_modes();
        let m = self.generator();
        match m.exact() {
            Some(e) => {
                let h = exact::hnf(&e.b)?.h;
                for i in 0..n {
                    for j in n..2 * n {
                        if !num_traits::Zero::is_zero(h.get(i, j)) {
                            return Ok(None);
                        }
                    }
                }
                let block = |off: usize| {
                    let mut b = ExactMatrix::zeros(n, n);
                    for i in 0..n {
                        for j in 0..n {
                            b.set(i, j, h.get(off + i, off + j).clone());
                        }
                    }
                    GeneratorMatrix::from_exact(b, e.c)
                };
                Ok(Some((block(0)?, block(n)?)))
            }
            None => {
                let eps = 1e-12 * m.max_row_norm();
                let mut q_rows = Vec::new();
                let mut p_rows = Vec::new();
                for r in m.rows() {
                    let q_zero = r[..n].iter().all(|x| x.abs() <= eps);
                    let p_zero = r[n..].iter().all(|x| x.abs() <= eps);
                    if p_zero {
                        q_rows.push(r[..n].to_vec());
                    } else if q_zero {
                        p_rows.push(r[n..].to_vec());
                    } else {
                        return Err(Error::NoExactForm);
                    }
                }
                if q_rows.len() != n || p_rows.len() != n {
                    return Err(Error::NoExactForm);
                }
                Ok(Some((GeneratorMatrix::from_rows(&q_rows)?, GeneratorMatrix::from_rows(&p_rows)?)))
            }
        }
    }

    /// `(Δ_q, Δ_p)`: shortest nontrivial q-type logical in `L_p^*/L_q` and
    /// p-type logical in `L_q^*/L_p`.
    pub fn css_distances(&self) -> Result<(f64, f64)> {
        let opts = EnumOptions::default();
        let (mq, mp) = self.css_split()?.ok_or(Error::NotCss)?;
        let sector = |sub: &GeneratorMatrix, other: &GeneratorMatrix| -> Result<f64> {
            let sup = other.dual(DualKind::Euclidean)?;
            if (sub.abs_det() / sup.abs_det() - 1.0).abs() < 1e-9 {
                return Err(Error::TrivialCode);
            }
            Ok(shortest_outside(&sup, &opts, |e| sub.member(&e.vector, MemberMode::Auto))?.delta)
        };
        Ok((sector(&mq, &mp)?, sector(&mp, &mq)?))
    }
}
