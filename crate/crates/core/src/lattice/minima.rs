use num_integer::Integer;

use super::{EnumOptions, GeneratorMatrix, DEFAULT_DELTA};
use crate::error::{Error, Result};

/// Incremental row echelon over the rationals, kept integral and primitive.
#[derive(Default)]
pub(crate) struct Echelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert `v`; returns whether it was independent of the rows so far.
    pub(crate) fn insert(&mut self, v: &[i64]) -> bool {
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (p, row) in &self.rows {
            if w[*p] == 0 {
                continue;
            }
            let (a, b) = (row[*p], w[*p]);
            let g = a.gcd(&b);
            let (fa, fb) = (a / g, b / g);
            for (x, y) in w.iter_mut().zip(row) {
                *x = *x * fa - y * fb;
            }
            normalize(&mut w);
        }
        match w.iter().position(|&x| x != 0) {
            Some(p) => {
                self.rows.push((p, w));
                true
            }
            None => false,
        }
    }
}

fn normalize(w: &mut [i128]) {
    let g = w.iter().fold(0i128, |acc, x| acc.gcd(x));
    if g > 1 {
        for x in w.iter_mut() {
            *x /= g;
        }
    }
}

/// λ₁ … λ_dim, found by enumerating within the longest LLL basis vector and
/// greedily keeping vectors whose integer coefficients are independent.
pub(crate) fn successive_minima(m: &GeneratorMatrix, opts: &EnumOptions) -> Result<Vec<f64>> {
    let dim = m.dim();
    let reduced = m.lll_reduce(DEFAULT_DELTA)?;
    let r2 = reduced.max_row_norm().powi(2);
    let list = m.enumerate_short_vectors(r2, None, opts)?;
    let mut ech = Echelon::default();
    let mut minima = Vec::with_capacity(dim);
    for e in &list.entries {
        if e.coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        if ech.insert(&e.coeffs) {
            minima.push(e.norm2.sqrt());
            if minima.len() == dim {
                return Ok(minima);
            }
        }
    }
    Err(Error::InconsistentInput { rank: minima.len(), expected: dim })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_rank() {
        let mut e = Echelon::default();
        assert!(e.insert(&[2, 4, 0]));
        assert!(!e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[2, 5, 1]));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn minima_of_rectangular_lattice() {
        let m = GeneratorMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let l = m.successive_minima(&EnumOptions::default()).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12 && (l[1] - 3.0).abs() < 1e-12);
    }
}
