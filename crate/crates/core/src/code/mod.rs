//! Validated GKP codes: symplectic Gram matrix, logical dimension, phase
//! sector, the logical coset system, standard forms and distances.
//!
//! Phases are always relative to the generator the code was built with:
//! re-basing the lattice changes `φ_M`, so the stored basis is part of the
//! code's identity.

mod bounds;
mod cosets;
mod distance;
mod standard;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::constructions::QubitStabilizerCode;
use crate::error::{Error, Result};
use crate::exact::{self, ExactMatrix};
use crate::lattice::{symplectic_form, DualKind, GeneratorMatrix};

pub use bounds::{BoundCheck, BoundsReport};
pub use cosets::{CosetLabel, CosetSystem};
pub(crate) use distance::shortest_outside;
pub use distance::Distance;
pub use standard::{symplectic_defect, Equivalence, StandardForm};

/// Tolerance for snapping the symplectic Gram matrix to integers.
pub const GRAM_TOL: f64 = 1e-9;

/// Tolerance on dual-lattice coefficients when classifying displacements.
pub const DUAL_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct GkpCode {
    name: String,
    generator: GeneratorMatrix,
    dual: GeneratorMatrix,
    gram: ExactMatrix,
    gram_i64: Vec<Vec<i64>>,
    logical_dim: u64,
    cosets: CosetSystem,
    origin: Option<QubitStabilizerCode>,
}

impl GkpCode {
    /// Validate `m` as a GKP stabilizer lattice: `A = MJMᵀ` integral and
    /// `|det M| = √|det A|` a positive integer.
    pub fn validate(name: impl Into<String>, m: GeneratorMatrix) -> Result<Self> {
        if m.dim() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("generator dimension {} is odd", m.dim())));
        }
        let gram = match m.symplectic_gram_exact() {
            Some(a) => {
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        let x = a.get(i, j);
                        if !x.is_integer() {
                            return Err(Error::NonIntegralSymplecticGram {
                                row: i,
                                col: j,
                                value: x.to_f64().unwrap_or(f64::NAN),
                            });
                        }
                    }
                }
                a
            }
            None => {
                let a = m.symplectic_gram()?;
                let mut rows = vec![vec![0i64; a.ncols()]; a.nrows()];
                for i in 0..a.nrows() {
                    for j in 0..a.ncols() {
                        let x = a[(i, j)];
                        let r = x.round();
                        if (x - r).abs() > GRAM_TOL * x.abs().max(1.0) {
                            return Err(Error::NonIntegralSymplecticGram { row: i, col: j, value: x });
                        }
                        rows[i][j] = r as i64;
                    }
                }
                ExactMatrix::from_i64_rows(&rows)
            }
        };
        let det_a = exact::det_exact(&gram)?.to_integer().abs();
        let det_m = m.abs_det();
        let d = det_a.sqrt();
        if det_a.is_zero() || &d * &d != det_a {
            return Err(Error::NonIntegerLogicalDim { det_m, det_a: det_a.to_string() });
        }
        let d = d.to_u64().ok_or_else(|| Error::NonIntegerLogicalDim { det_m, det_a: det_a.to_string() })?;
        if (det_m - d as f64).abs() > GRAM_TOL * (d as f64).max(1.0) * m.dim() as f64 {
            return Err(Error::NonIntegerLogicalDim { det_m, det_a: det_a.to_string() });
        }
        let gram_i64 = gram
            .to_i64_rows()
            .ok_or_else(|| Error::InvalidArgument("symplectic Gram entries exceed i64".into()))?;
        let dual = m.dual(DualKind::Symplectic)?;
        let cosets = CosetSystem::new(&gram)?;
        Ok(GkpCode { name: name.into(), generator: m, dual, gram, gram_i64, logical_dim: d, cosets, origin: None })
    }

    /// Attach the qubit code this lattice was concatenated from.
    pub fn with_origin(mut self, q: QubitStabilizerCode) -> Self {
        self.origin = Some(q);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_modes(&self) -> usize {
        self.generator.n_modes()
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    /// Canonical symplectic dual basis `M⊥ = M^{-T}Jᵀ`.
    pub fn dual(&self) -> &GeneratorMatrix {
        &self.dual
    }

    /// Symplectic Gram matrix `A = MJMᵀ`.
    pub fn symplectic_gram(&self) -> &ExactMatrix {
        &self.gram
    }

    pub fn symplectic_gram_i64(&self) -> &[Vec<i64>] {
        &self.gram_i64
    }

    /// Logical dimension `d`.
    pub fn logical_dim(&self) -> u64 {
        self.logical_dim
    }

    /// `log₂ d`, the number of encoded qubits (fractional for non-power-of-two `d`).
    pub fn k(&self) -> f64 {
        (self.logical_dim as f64).log2()
    }

    pub fn cosets(&self) -> &CosetSystem {
        &self.cosets
    }

    pub fn origin(&self) -> Option<&QubitStabilizerCode> {
        self.origin.as_ref()
    }

    /// `aᵀ A▽ a mod 2` for coefficient vector `a`, with `A▽` the strictly
    /// lower triangle of `A`.
    pub fn phase_parity(&self, a: &[i64]) -> u8 {
        let mut acc: i128 = 0;
        for i in 0..a.len() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                acc += a[i] as i128 * self.gram_i64[i][j] as i128 * a[j] as i128;
            }
        }
        acc.rem_euclid(2) as u8
    }

    /// Phase sector `φ_M(ξ) ∈ {0, π}` of a lattice vector.
    pub fn phase_sector(&self, xi: &[f64]) -> Result<f64> {
        let a = self.generator.integer_coefficients(xi, 1e-9)?.ok_or(Error::NotInLattice)?;
        Ok(if self.phase_parity(&a) == 1 { std::f64::consts::PI } else { 0.0 })
    }

    /// Integer coefficients of a dual-lattice vector in the basis `M⊥`.
    pub fn dual_coefficients(&self, x: &[f64]) -> Result<Vec<i64>> {
        self.dual.integer_coefficients(x, DUAL_TOL)?.ok_or(Error::NotInDualLattice)
    }

    /// Logical class of `x ∈ L⊥`; zero iff `x ∈ L`.
    pub fn coset_label(&self, x: &[f64]) -> Result<CosetLabel> {
        Ok(self.cosets.label_of_coeffs(&self.dual_coefficients(x)?))
    }

    /// A dual vector in the class `label`.
    pub fn coset_representative(&self, label: &[u64]) -> Vec<f64> {
        self.dual.combine(&self.cosets.representative_coeffs(label))
    }

    /// Is `x` a stabilizer displacement (an element of `L`)?
    pub fn is_stabilizer(&self, x: &[f64]) -> Result<bool> {
        Ok(self.generator.integer_coefficients(x, DUAL_TOL)?.is_some())
    }

    /// The code transformed by the symplectic map `x ↦ x·S` (lattice basis
    /// `M·S`). `S` must be symplectic for the result to validate.
    pub fn transformed(&self, s: &DMatrix<f64>, name: impl Into<String>) -> Result<Self> {
        GkpCode::validate(name, self.generator.transformed(s)?)
    }

    /// Uniformly squeezed code: q quadratures scaled by `η⁻¹`, p by `η`.
    pub fn squeezed(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("squeezing parameter {eta} must be positive")));
        }
        let n = self.n_modes();
        let s = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| if i < n { 1.0 / eta } else { eta }));
        self.transformed(&s, format!("{}-squeezed", self.name))
    }

    /// `J` of matching size.
    pub fn j(&self) -> DMatrix<f64> {
        symplectic_form(self.n_modes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> GkpCode {
        GkpCode::validate("square", GeneratorMatrix::from_int_rows(&[vec![2, 0], vec![0, 2]], 2).unwrap()).unwrap()
    }

    #[test]
    fn square_code_parameters() {
        let c = square();
        assert_eq!(c.logical_dim(), 2);
        assert_eq!(c.symplectic_gram(), &ExactMatrix::from_i64_rows(&[vec![0, 2], vec![-2, 0]]));
        assert_eq!(c.cosets().order(), 4);
    }

    #[test]
    fn hexagonal_is_valid() {
        let s = 3f64.powf(-0.25);
        let m = GeneratorMatrix::from_rows(&[vec![2.0 * s, 0.0], vec![s, 3f64.sqrt() * s]]).unwrap();
        let c = GkpCode::validate("hex", m).unwrap();
        assert_eq!(c.logical_dim(), 2);
        assert_eq!(c.symplectic_gram(), &ExactMatrix::from_i64_rows(&[vec![0, 2], vec![-2, 0]]));
    }

    #[test]
    fn odd_scaled_is_valid() {
        let m = GeneratorMatrix::from_int_rows(&[vec![3, 0], vec![0, 3]], 3).unwrap();
        let c = GkpCode::validate("qutrit", m).unwrap();
        assert_eq!(c.logical_dim(), 3);
        assert_eq!(c.symplectic_gram(), &ExactMatrix::from_i64_rows(&[vec![0, 3], vec![-3, 0]]));
    }

    #[test]
    fn rejects_non_integral() {
        let m = GeneratorMatrix::from_rows(&[vec![1.3, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(GkpCode::validate("bad", m), Err(Error::NonIntegralSymplecticGram { row: 0, col: 1, .. })));
    }

    #[test]
    fn phases() {
        let sensor = GkpCode::validate("sensor", GeneratorMatrix::from_int_rows(&[vec![1, 0], vec![0, 1]], 1).unwrap())
            .unwrap();
        assert_eq!(sensor.phase_sector(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(sensor.phase_sector(&[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(sensor.phase_sector(&[1.0, 1.0]).unwrap(), std::f64::consts::PI);
        assert_eq!(sensor.phase_sector(&[2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(sensor.phase_sector(&[0.5, 0.0]), Err(Error::NotInLattice));
    }

    #[test]
    fn square_labels() {
        let c = square();
        let h = 1.0 / 2f64.sqrt();
        let x = c.coset_label(&[h, 0.0]).unwrap();
        let p = c.coset_label(&[0.0, h]).unwrap();
        assert!(!CosetSystem::is_zero(&x) && !CosetSystem::is_zero(&p) && x != p);
        assert!(CosetSystem::is_zero(&c.coset_label(&[2f64.sqrt(), 0.0]).unwrap()));
        assert_eq!(c.coset_label(&[h + 2f64.sqrt(), -2f64.sqrt()]).unwrap(), x);
        assert_eq!(c.coset_label(&[0.3, 0.0]), Err(Error::NotInDualLattice));
    }
}
