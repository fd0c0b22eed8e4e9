use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::{smith, ExactMatrix, SmithDecomposition};

/// A logical class in `L⊥/L`: one residue per nontrivial invariant factor.
pub type CosetLabel = Vec<u64>;

/// The dual quotient `L⊥/L ≅ Z_{s₁} × … × Z_{s_m}` realised through the
/// Smith form `U·A·V = S` of the symplectic Gram matrix.
///
/// A dual vector with integer coefficients `a` in the canonical dual basis
/// belongs to `L` iff `a` lies in the row span of `A`, i.e. iff every entry
/// of `a·V` is divisible by the matching `sᵢ`.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    smith: SmithDecomposition,
    orders: Vec<u64>,
    positions: Vec<usize>,
    v: Vec<Vec<i64>>,
    v_inv: Vec<Vec<i64>>,
}

impl CosetSystem {
    pub fn new(a: &ExactMatrix) -> Result<Self> {
        let smith = smith(a)?;
        let diag = smith.diagonal();
        let mut orders = Vec::new();
        let mut positions = Vec::new();
        for (i, s) in diag.iter().enumerate() {
            let s = s.to_u64().ok_or(Error::SingularMatrix)?;
            if s == 0 {
                return Err(Error::SingularMatrix);
            }
            if s > 1 {
                orders.push(s);
                positions.push(i);
            }
        }
        let too_big = || Error::InvalidArgument("Smith transform entries exceed i64".into());
        let v = smith.v.to_i64_rows().ok_or_else(too_big)?;
        let v_inv = smith.v.inverse()?.to_i64_rows().ok_or_else(too_big)?;
        Ok(CosetSystem { smith, orders, positions, v, v_inv })
    }

    pub fn smith(&self) -> &SmithDecomposition {
        &self.smith
    }

    /// Orders of the nontrivial cyclic factors.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Group order `|L⊥/L| = d²`.
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn zero(&self) -> CosetLabel {
        vec![0; self.orders.len()]
    }

    pub fn is_zero(label: &[u64]) -> bool {
        label.iter().all(|&x| x == 0)
    }

    /// Label of the dual vector with integer coefficients `a` (in the
    /// canonical dual basis `M⊥`).
    pub fn label_of_coeffs(&self, a: &[i64]) -> CosetLabel {
        self.positions
            .iter()
            .zip(&self.orders)
            .map(|(&col, &s)| {
                let mut acc: i128 = 0;
                for (ai, row) in a.iter().zip(&self.v) {
                    acc += *ai as i128 * row[col] as i128;
                }
                acc.rem_euclid(s as i128) as u64
            })
            .collect()
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> CosetLabel {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), s)| (a + b) % s).collect()
    }

    pub fn negate(&self, x: &[u64]) -> CosetLabel {
        x.iter().zip(&self.orders).map(|(a, s)| (s - a) % s).collect()
    }

    /// Mixed-radix index in `0..order()`.
    pub fn index(&self, label: &[u64]) -> usize {
        label.iter().zip(&self.orders).fold(0usize, |acc, (&l, &s)| acc * s as usize + l as usize)
    }

    pub fn label_at(&self, mut index: usize) -> CosetLabel {
        let mut out = vec![0; self.orders.len()];
        for (o, &s) in out.iter_mut().zip(&self.orders).rev() {
            *o = (index % s as usize) as u64;
            index /= s as usize;
        }
        out
    }

    /// All labels in index order.
    pub fn labels(&self) -> Vec<CosetLabel> {
        (0..self.order() as usize).map(|i| self.label_at(i)).collect()
    }

    /// Integer dual-basis coefficients of a representative: `a = ℓ·V⁻¹`.
    pub fn representative_coeffs(&self, label: &[u64]) -> Vec<i64> {
        let dim = self.v.len();
        let mut full = vec![0i64; dim];
        for (&pos, &l) in self.positions.iter().zip(label) {
            full[pos] = l as i64;
        }
        (0..dim).map(|j| (0..dim).map(|i| full[i] * self.v_inv[i][j]).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_code_quotient() {
        let a = ExactMatrix::from_i64_rows(&[vec![0, 2], vec![-2, 0]]);
        let cs = CosetSystem::new(&a).unwrap();
        assert_eq!(cs.orders(), &[2, 2]);
        assert_eq!(cs.order(), 4);
        assert!(CosetSystem::is_zero(&cs.label_of_coeffs(&[0, 2])));
        assert!(!CosetSystem::is_zero(&cs.label_of_coeffs(&[1, 0])));
        for l in cs.labels() {
            assert_eq!(cs.label_of_coeffs(&cs.representative_coeffs(&l)), l);
            assert_eq!(cs.label_at(cs.index(&l)), l);
        }
    }
}
