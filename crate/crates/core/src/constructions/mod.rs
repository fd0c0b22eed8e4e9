//! Code factories: scaled self-dual codes, concatenation with qubit codes
//! (Construction A) via greedy minimal-basis completion, glued lattices,
//! direct sums and tensor products.

mod qubit;
pub mod registry;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::code::{shortest_outside, GkpCode};
use crate::error::{Error, Result};
use crate::exact::{self, ExactMatrix, IntMat};
use crate::lattice::{DualKind, EnumOptions, GeneratorMatrix, MemberMode};

pub use qubit::{QubitStabilizerCode, MAX_GROUP_BITS};

/// Tolerance for integrality of euclidean/symplectic products on float data.
const INTEGRAL_TOL: f64 = 1e-9;

fn snap(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= INTEGRAL_TOL * x.abs().max(1.0)).then_some(r as i64)
}

/// `√λ · M₀` for a self-dual seed (`M₀JM₀ᵀ` integral and unimodular).
///
/// Qubit-like codes need `λ` even; odd `λ` (qudit codes) must be requested
/// explicitly with `allow_odd`.
pub fn scaled_code(name: impl Into<String>, seed: &GeneratorMatrix, lambda: u64, allow_odd: bool) -> Result<GkpCode> {
    if lambda == 0 {
        return Err(Error::InvalidArgument("scale λ must be positive".into()));
    }
    if lambda % 2 == 1 && !allow_odd {
        return Err(Error::OddScale(lambda));
    }
    if seed.dim() % 2 != 0 {
        return Err(Error::NotSelfDual);
    }
    match GkpCode::validate("seed", seed.clone()) {
        Ok(c) if c.logical_dim() == 1 => {}
        Ok(_) | Err(Error::NonIntegralSymplecticGram { .. }) | Err(Error::NonIntegerLogicalDim { .. }) => {
            return Err(Error::NotSelfDual)
        }
        Err(e) => return Err(e),
    }
    GkpCode::validate(name, seed.scaled_sqrt(lambda)?)
}

fn stacked_hnf(rows: &[Vec<BigInt>]) -> IntMat {
    let (h, _, rank) = exact::int_hnf(&rows.to_vec());
    h.into_iter().take(rank).collect()
}

fn int_rows(rows: &[Vec<u8>]) -> IntMat {
    rows.iter().map(|r| r.iter().map(|&b| BigInt::from(b)).collect()).collect()
}

/// Greedy completion of binary lattice rows (`qqpp` ordering) to a basis of
/// `{x : √2·x mod 2 ∈ span(rows)}`, appending `2eᵢ` for `i = 0, 1, …`
/// whenever it is not yet in the lattice. The result is `[rows; 2eᵢ…]/√2`.
pub fn minimal_basis_completion(rows: &[Vec<u8>]) -> Result<GeneratorMatrix> {
    let dim = rows.first().map_or(0, Vec::len);
    minimal_basis_completion_ordered(rows, &(0..dim).collect::<Vec<_>>())
}

/// [`minimal_basis_completion`] visiting the unit vectors in `order`
/// (a permutation of `0..2n`).
pub fn minimal_basis_completion_ordered(rows: &[Vec<u8>], order: &[usize]) -> Result<GeneratorMatrix> {
    let dim = rows.first().map_or(0, Vec::len);
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::InvalidArgument("rows must have even, nonzero length".into()));
    }
    if rows.iter().any(|r| r.len() != dim || r.iter().any(|&b| b > 1)) {
        return Err(Error::InvalidArgument("rows must be binary and of equal length".into()));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dim).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument("completion order must be a permutation of 0..2n".into()));
    }
    let unit = |i: usize| -> Vec<BigInt> { (0..dim).map(|j| BigInt::from(if i == j { 2 } else { 0 })).collect() };
    let mut basis = int_rows(rows);
    let mut h = stacked_hnf(&basis);
    for &i in order {
        let mut stack = basis.clone();
        stack.push(unit(i));
        let h2 = stacked_hnf(&stack);
        // Membership test: appending a lattice vector leaves the HNF unchanged.
        if h2 != h {
            basis = stack;
            h = h2;
        }
    }
    let mut full = int_rows(rows);
    full.extend((0..dim).map(unit));
    let rank = h.len();
    if basis.len() != dim || rank != dim || stacked_hnf(&full) != h {
        return Err(Error::InconsistentInput { rank: basis.len(), expected: dim });
    }
    GeneratorMatrix::from_exact(ExactMatrix::from_int_rows(&basis), 2)
}

/// Concatenation of the square GKP code with `q` (Construction A).
pub fn construction_a(q: &QubitStabilizerCode) -> Result<GkpCode> {
    construction_a_with_order(q, &(0..2 * q.n()).collect::<Vec<_>>())
}

/// [`construction_a`] with a custom completion order.
pub fn construction_a_with_order(q: &QubitStabilizerCode, order: &[usize]) -> Result<GkpCode> {
    let rows = if q.r() == 0 { Vec::new() } else { q.lattice_rows() };
    let m = if rows.is_empty() {
        let dim = 2 * q.n();
        GeneratorMatrix::from_int_rows(
            &(0..dim).map(|i| (0..dim).map(|j| if i == j { 2 } else { 0 }).collect()).collect::<Vec<_>>(),
            2,
        )?
    } else {
        minimal_basis_completion_ordered(&rows, order)?
    };
    Ok(GkpCode::validate(format!("concat-{}", q.n()), m)?.with_origin(q.clone()))
}

/// Common denominator for `Bᵢ/√cᵢ` blocks: `c` with every `c/cᵢ` a square.
fn common_sqrt_denominator(cs: &[u64]) -> Option<(u64, Vec<u64>)> {
    let c = cs.iter().fold(1u64, |acc, &x| acc.lcm(&x));
    let mut factors = Vec::with_capacity(cs.len());
    for &ci in cs {
        let r = c / ci;
        let s = (r as f64).sqrt().round() as u64;
        if s * s != r {
            return None;
        }
        factors.push(s);
    }
    Some((c, factors))
}

/// Direct sum `⊕ᵢ Lᵢ` in `qqpp` ordering: the q block lists the q
/// coordinates of every component in order, followed by all p coordinates.
pub fn direct_sum(codes: &[GkpCode]) -> Result<GkpCode> {
    if codes.is_empty() {
        return Err(Error::InvalidArgument("direct sum of no codes".into()));
    }
    let total: usize = codes.iter().map(GkpCode::n_modes).sum();
    let dim = 2 * total;
    // (row offset, q offset, n) per component.
    let mut layout = Vec::with_capacity(codes.len());
    let mut off = 0;
    for c in codes {
        layout.push((2 * off, off, c.n_modes()));
        off += c.n_modes();
    }
    let place = |ni: usize, qoff: usize, j: usize| if j < ni { qoff + j } else { total + qoff + j - ni };
    let name = codes.iter().map(GkpCode::name).collect::<Vec<_>>().join("+");
    let exact: Option<Vec<_>> = codes.iter().map(|c| c.generator().exact()).collect();
    let common = exact.as_ref().and_then(|e| common_sqrt_denominator(&e.iter().map(|x| x.c).collect::<Vec<_>>()));
    let m = match (exact, common) {
        (Some(forms), Some((c, factors))) => {
            let mut b = ExactMatrix::zeros(dim, dim);
            for ((form, &(roff, qoff, ni)), s) in forms.iter().zip(&layout).zip(factors) {
                let s = BigRational::from_integer(BigInt::from(s));
                for i in 0..2 * ni {
                    for j in 0..2 * ni {
                        b.set(roff + i, place(ni, qoff, j), form.b.get(i, j) * &s);
                    }
                }
            }
            GeneratorMatrix::from_exact(b, c)?
        }
        _ => {
            let mut m = DMatrix::zeros(dim, dim);
            for (code, &(roff, qoff, ni)) in codes.iter().zip(&layout) {
                let g = code.generator().matrix();
                for i in 0..2 * ni {
                    for j in 0..2 * ni {
                        m[(roff + i, place(ni, qoff, j))] = g[(i, j)];
                    }
                }
            }
            GeneratorMatrix::new(m)?
        }
    };
    GkpCode::validate(name, m)
}

/// A base lattice `L₀ = ⊕ Lᵢ` together with glue vectors `gᵢ ∈ L₀⊥`.
#[derive(Clone, Debug)]
pub struct GlueSpec {
    base: GkpCode,
    glue: Vec<Vec<f64>>,
    /// Coefficients of each glue vector in the base basis.
    coeffs: Vec<Vec<BigRational>>,
    orders: Vec<u64>,
}

impl GlueSpec {
    /// Glue vectors are given in the `qqpp` coordinates of [`direct_sum`].
    pub fn new(components: &[GkpCode], glue: Vec<Vec<f64>>) -> Result<Self> {
        let base = direct_sum(components)?;
        let dim = 2 * base.n_modes();
        let a_inv = base.symplectic_gram().inverse()?;
        let mut coeffs = Vec::with_capacity(glue.len());
        let mut orders = Vec::with_capacity(glue.len());
        for (i, g) in glue.iter().enumerate() {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
            }
            // Integer symplectic products with L₀ ⇔ integer coefficients in M⊥.
            let b = base
                .dual()
                .integer_coefficients(g, INTEGRAL_TOL)?
                .ok_or_else(|| Error::InvalidGlue(format!("glue vector {i} has non-integer symplectic products with the base")))?;
            // g = b·M⊥ = b·A⁻¹·M
            let a: Vec<BigRational> = (0..dim)
                .map(|j| {
                    (0..dim).fold(BigRational::zero(), |acc, l| acc + a_inv.get(l, j) * BigRational::from_integer(BigInt::from(b[l])))
                })
                .collect();
            let order = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            orders.push(order.to_u64().ok_or_else(|| Error::InvalidGlue("glue order overflow".into()))?);
            coeffs.push(a);
        }
        for i in 0..glue.len() {
            for j in i + 1..glue.len() {
                let w = crate::lattice::symplectic_product(&glue[i], &glue[j]);
                if snap(w).is_none() {
                    return Err(Error::InvalidGlue(format!("glue vectors {i} and {j} have symplectic product {w}")));
                }
            }
        }
        Ok(GlueSpec { base, glue, coeffs, orders })
    }

    pub fn base(&self) -> &GkpCode {
        &self.base
    }

    pub fn glue_vectors(&self) -> &[Vec<f64>] {
        &self.glue
    }

    /// Order `nᵢ` of each glue vector modulo the base lattice.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }
}

/// The glued lattice `L₀[G]`, with `|det| = |det L₀| / ∏ nᵢ` enforced.
pub fn glue(spec: &GlueSpec) -> Result<GkpCode> {
    let base = spec.base.generator();
    if spec.glue.is_empty() {
        return Ok(spec.base.clone());
    }
    let dim = base.dim();
    let n = spec.coeffs.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    // Work in coefficient space scaled by N: the base contributes N·I.
    let mut stack: IntMat =
        (0..dim).map(|i| (0..dim).map(|j| if i == j { n.clone() } else { BigInt::zero() }).collect()).collect();
    for a in &spec.coeffs {
        stack.push(a.iter().map(|x| (x * BigRational::from_integer(n.clone())).to_integer()).collect());
    }
    let h = stacked_hnf(&stack);
    let ratio = BigRational::new(num_traits::pow(n.clone(), dim), exact::int_det(&h).abs());
    if !ratio.is_integer() {
        return Err(Error::NonIntegerDeterminantRatio(ratio.to_string()));
    }
    let expected: BigInt = spec.orders.iter().map(|&o| BigInt::from(o)).product();
    if ratio.to_integer() != expected {
        return Err(Error::InvalidGlue(format!(
            "determinant ratio {} differs from the product of glue orders {expected}; glue generators are not independent",
            ratio
        )));
    }
    let name = format!("{}-glued", spec.base.name());
    let m = match base.exact() {
        Some(e) => {
            let hb = ExactMatrix::from_int_rows(&h).mul(&e.b)?;
            let nn = n.to_u64().ok_or_else(|| Error::InvalidGlue("glue order overflow".into()))?;
            GeneratorMatrix::from_exact(hb, e.c * nn * nn)?
        }
        None => {
            let hf = ExactMatrix::from_int_rows(&h).to_f64() / n.to_f64().unwrap_or(f64::NAN);
            GeneratorMatrix::new(hf * base.matrix())?
        }
    };
    GkpCode::validate(name, m)
}

/// `M₁ ⊗ M₂` for a single-mode code `M₁` and an integral lattice `M₂`.
/// With `J₂ₙ = J₂ ⊗ Iₙ` the Kronecker product is already in `qqpp` order.
pub fn tensor_code(code1: &GkpCode, m2: &GeneratorMatrix) -> Result<GkpCode> {
    if code1.n_modes() != 1 {
        return Err(Error::InvalidArgument("left tensor factor must be a single-mode code".into()));
    }
    let g2 = integral_gram(m2)?;
    let m1 = code1.generator();
    let m = match (m1.exact(), m2.exact()) {
        (Some(e1), Some(e2)) => {
            let (b1, b2) = (e1.b.to_int_rows()?, e2.b.to_int_rows()?);
            let k = kron_int(&b1, &b2);
            GeneratorMatrix::from_exact(ExactMatrix::from_int_rows(&k), e1.c * e2.c)?
        }
        _ => GeneratorMatrix::new(m1.matrix().kronecker(m2.matrix()))?,
    };
    let code = GkpCode::validate(format!("{}⊗L{}", code1.name(), m2.dim()), m)?;
    // A_⊗ = A₁ ⊗ G₂ and k_⊗ = (m/2)·log₂|A₁| + log₂|G₂|.
    let a1 = code1.symplectic_gram().to_int_rows()?;
    let expected = kron_int(&a1, &g2);
    if code.symplectic_gram().to_int_rows()? != expected {
        return Err(Error::InvalidArgument("tensor symplectic Gram differs from A₁ ⊗ G₂".into()));
    }
    let det_a1 = exact::int_det(&a1).abs().to_f64().unwrap_or(f64::NAN);
    let det_g2 = exact::int_det(&g2).abs().to_f64().unwrap_or(f64::NAN);
    let k_expected = m2.dim() as f64 / 2.0 * det_a1.log2() + det_g2.log2();
    if (code.k() - k_expected).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("tensor k = {} differs from {k_expected}", code.k())));
    }
    Ok(code)
}

fn integral_gram(m: &GeneratorMatrix) -> Result<IntMat> {
    if let Some(e) = m.exact() {
        let g = e.b.mul(&e.b.transpose())?.scale(&BigRational::new(BigInt::one(), BigInt::from(e.c)));
        return g.to_int_rows().map_err(|_| Error::NonIntegralG2);
    }
    let g = m.gram();
    let mut out = vec![vec![BigInt::zero(); g.ncols()]; g.nrows()];
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            out[i][j] = BigInt::from(snap(g[(i, j)]).ok_or(Error::NonIntegralG2)?);
        }
    }
    Ok(out)
}

fn kron_int(a: &IntMat, b: &IntMat) -> IntMat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![BigInt::zero(); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// The quantities of the tensor-product distance sandwich
/// `max{Δ₁/λ_m(L₂), Δ₂/λ₂(L₁)} ≤ Δ_⊗ ≤ Δ₁Δ₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorBounds {
    pub delta: f64,
    pub delta1: f64,
    /// `None` when `L₂` is unimodular (no nontrivial `L₂*/L₂`).
    pub delta2: Option<f64>,
    pub lower: f64,
    pub upper: Option<f64>,
}

impl TensorBounds {
    pub fn holds(&self) -> bool {
        let tol = 1e-9 * self.delta.max(1.0);
        self.lower <= self.delta + tol && self.upper.map_or(true, |u| self.delta <= u + tol)
    }
}

pub fn tensor_distance_bounds(code1: &GkpCode, m2: &GeneratorMatrix) -> Result<TensorBounds> {
    let opts = EnumOptions::default();
    let product = tensor_code(code1, m2)?;
    let delta = product.distance_with(&opts)?.delta;
    let delta1 = code1.distance_with(&opts)?.delta;
    let l1 = code1.generator().successive_minima(&opts)?;
    let l2 = m2.successive_minima(&opts)?;
    let delta2 = if exact::int_det(&integral_gram(m2)?).abs().is_one() {
        None
    } else {
        let dual = m2.dual(DualKind::Euclidean)?;
        Some(shortest_outside(&dual, &opts, |e| m2.member(&e.vector, MemberMode::Auto))?.delta)
    };
    let mut lower = delta1 / l2[l2.len() - 1];
    if let Some(d2) = delta2 {
        lower = lower.max(d2 / l1[1]);
    }
    Ok(TensorBounds { delta, delta1, delta2, lower, upper: delta2.map(|d2| delta1 * d2) })
}
