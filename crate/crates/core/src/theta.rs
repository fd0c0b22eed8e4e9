//! Theta series `Θ_L(z) = Σ_δ N_δ q^δ` (`q = e^{iπz}`): direct enumeration,
//! evaluation on the imaginary axis with a certified tail, the functional
//! equation relating `L` and its dual, Construction-A series from weight
//! enumerators, and the distance read off from `Θ_{L⊥} − Θ_L`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::code::GkpCode;
use crate::constructions::{QubitStabilizerCode, MAX_GROUP_BITS};
use crate::error::{Error, Result};
use crate::gf2;
use crate::lattice::{DualKind, EnumOptions, GeneratorMatrix};

/// Float shells closer than this are merged.
pub const SHELL_TOL: f64 = 1e-8;

/// Safety factor on the fitted shell-growth envelope.
const ENVELOPE_SAFETY: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaTerm {
    /// Squared norm `δ`.
    pub delta: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaSeries {
    pub terms: Vec<ThetaTerm>,
    /// Every shell with `δ ≤ cutoff` is listed.
    pub cutoff: f64,
    /// Lattice dimension (governs the growth envelope of the tail).
    pub dim: usize,
    /// Shells were keyed by exact rational norms.
    pub exact_keys: bool,
    /// Largest spread of norms merged into one shell (0 for exact keys).
    pub max_shell_spread: f64,
}

/// `Θ(it)` together with a bound on the truncated tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl ThetaSeries {
    pub fn count_at(&self, delta: f64) -> u64 {
        self.terms.iter().find(|t| same_shell(t.delta, delta)).map_or(0, |t| t.count)
    }

    /// Number of vectors with `δ ≤ x`.
    pub fn cumulative(&self, x: f64) -> u64 {
        self.terms.iter().take_while(|t| t.delta <= x * (1.0 + 1e-12)).map(|t| t.count).sum()
    }

    /// The series restricted to `δ ≤ cutoff`.
    pub fn truncated(&self, cutoff: f64) -> ThetaSeries {
        let mut s = self.clone();
        s.terms.retain(|t| t.delta <= cutoff * (1.0 + 1e-12));
        s.cutoff = cutoff.min(self.cutoff);
        s
    }

    /// Same shells and counts, with `δ` compared at `SHELL_TOL`.
    pub fn matches(&self, other: &ThetaSeries) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|(a, b)| a.count == b.count && same_shell(a.delta, b.delta))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,count\n");
        for t in &self.terms {
            out.push_str(&format!("{},{}\n", t.delta, t.count));
        }
        out
    }

    /// `Σ N_δ e^{−πtδ}` with the tail beyond the cutoff bounded by
    /// `N(≤δ) ≤ C·δ^{D/2}`, `C` fitted on the listed shells.
    pub fn eval(&self, t: f64, tol: f64) -> Result<ThetaValue> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("theta needs t > 0, got {t}")));
        }
        let value: f64 = self.terms.iter().map(|s| s.count as f64 * (-PI * t * s.delta).exp()).sum();
        let tail_bound = self.tail_bound(t);
        if tail_bound > tol {
            return Err(Error::CutoffInsufficient { bound: tail_bound, tol });
        }
        Ok(ThetaValue { value, tail_bound })
    }

    fn tail_bound(&self, t: f64) -> f64 {
        let k = self.dim as f64 / 2.0;
        let mut cum = 0u64;
        let mut c: f64 = 0.0;
        for s in &self.terms {
            cum += s.count;
            if s.delta > 0.0 {
                c = c.max(cum as f64 / s.delta.powf(k));
            }
        }
        if c == 0.0 {
            // Only the origin listed: use the volume of a unit-density ball.
            c = 1.0;
        }
        let c = c * ENVELOPE_SAFETY;
        let x = self.cutoff;
        // ∫_X^∞ e^{−aδ} dN ≤ ∫_X^∞ a e^{−aδ} C δ^k dδ with a = πt, and
        // δ^k ≤ X^{k−m} δ^m for m = ⌈k⌉.
        let a = PI * t;
        let m = k.ceil() as u32;
        let shift = if x > 0.0 { x.powf(k - m as f64) } else { 1.0 };
        a * c * shift * upper_gamma_poly(m, a, x)
    }
}

/// `∫_X^∞ δ^m e^{−aδ} dδ = e^{−aX} Σ_{j≤m} m!/j! X^j / a^{m−j+1}`.
fn upper_gamma_poly(m: u32, a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a; // j = m: X^m / a
    let mut pow_x = x.powi(m as i32);
    let mut sum = pow_x * term;
    for j in (0..m).rev() {
        term *= (j + 1) as f64 / a;
        pow_x = if x > 0.0 { pow_x / x } else { if j == 0 { 1.0 } else { 0.0 } };
        sum += pow_x * term;
    }
    (-a * x).exp() * sum
}

fn same_shell(a: f64, b: f64) -> bool {
    (a - b).abs() <= SHELL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exhaustive theta series of `L(m)` up to `δ ≤ cutoff`.
pub fn theta_series(m: &GeneratorMatrix, cutoff: f64) -> Result<ThetaSeries> {
    theta_series_with(m, cutoff, &EnumOptions::default())
}

pub fn theta_series_with(m: &GeneratorMatrix, cutoff: f64, opts: &EnumOptions) -> Result<ThetaSeries> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("theta cutoff must be positive, got {cutoff}")));
    }
    let search = m.search();
    let exact_rows: Option<(Vec<Vec<i128>>, u64)> = m.exact().and_then(|e| {
        let rows = e.b.to_int_rows().ok()?;
        let rows: Option<Vec<Vec<i128>>> = rows.iter().map(|r| r.iter().map(|x| x.to_i128()).collect()).collect();
        Some((rows?, e.c))
    });
    let limit = cutoff * (1.0 + 1e-12);
    match exact_rows {
        Some((rows, c)) => {
            let parts = search.visit_ball(None, cutoff, opts, BTreeMap::<u128, u64>::new, |acc, x, _p, n2| {
                if n2 > limit * (1.0 + 1e-9) {
                    return;
                }
                let a = search.original_coeffs(x);
                let mut v = vec![0i128; rows.len()];
                for (ai, row) in a.iter().zip(&rows) {
                    if *ai != 0 {
                        for (o, b) in v.iter_mut().zip(row) {
                            *o += *ai as i128 * b;
                        }
                    }
                }
                let num: i128 = v.iter().map(|y| y * y).sum();
                *acc.entry(num as u128).or_insert(0) += 1;
            })?;
            let mut merged = BTreeMap::new();
            for p in parts {
                for (k, v) in p {
                    *merged.entry(k).or_insert(0u64) += v;
                }
            }
            let terms = merged
                .into_iter()
                .filter_map(|(num, count)| {
                    let g = gcd(num, c as u128).max(1);
                    let delta = (num / g) as f64 / (c as u128 / g) as f64;
                    (delta <= limit).then_some(ThetaTerm { delta, count })
                })
                .collect();
            Ok(ThetaSeries { terms, cutoff, dim: m.dim(), exact_keys: true, max_shell_spread: 0.0 })
        }
        None => {
            let parts = search.visit_ball(None, cutoff, opts, Vec::<f64>::new, |acc, _x, _p, n2| {
                if n2 <= limit {
                    acc.push(n2)
                }
            })?;
            let mut norms: Vec<f64> = parts.into_iter().flatten().collect();
            norms.sort_by(f64::total_cmp);
            let mut terms: Vec<ThetaTerm> = Vec::new();
            let mut spread: f64 = 0.0;
            let mut first = 0.0;
            for n2 in norms {
                let n2 = if n2.abs() < 1e-20 { 0.0 } else { n2 };
                match terms.last_mut() {
                    Some(t) if same_shell(first, n2) => {
                        t.count += 1;
                        spread = spread.max(n2 - first);
                    }
                    _ => {
                        first = n2;
                        terms.push(ThetaTerm { delta: n2, count: 1 });
                    }
                }
            }
            Ok(ThetaSeries { terms, cutoff, dim: m.dim(), exact_keys: false, max_shell_spread: spread })
        }
    }
}

/// `Θ_L(it)` to absolute accuracy `tol`, enlarging the cutoff as needed.
pub fn theta_value(m: &GeneratorMatrix, t: f64, tol: f64) -> Result<ThetaValue> {
    let l1 = m.search().reduced_basis().iter().map(|r| r.iter().map(|x| x * x).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let mut cutoff = ((1.0 / tol).ln() / (PI * t)).max(l1 * 1.01);
    loop {
        let series = theta_series(m, cutoff)?;
        match series.eval(t, tol) {
            Err(Error::CutoffInsufficient { .. }) => cutoff *= 1.25,
            other => return other,
        }
    }
}

/// Residual `|Θ_{L*}(it) − det(L)·t^{−D/2}·Θ_L(i/t)|` from independent
/// enumerations of `L` and its euclidean dual.
pub fn theta_dual_check(m: &GeneratorMatrix, t: f64, tol: f64) -> Result<f64> {
    let dual = m.dual(DualKind::Euclidean)?;
    let eps = tol / 100.0;
    let lhs = theta_value(&dual, t, eps)?.value;
    let rhs = m.abs_det() * t.powf(-(m.dim() as f64) / 2.0) * theta_value(m, 1.0 / t, eps / m.abs_det())?.value;
    Ok((lhs - rhs).abs())
}

/// Functional-equation residual for a code; concatenated codes use the
/// weight enumerators of the stabilizer group and of its normalizer.
pub fn theta_dual_check_code(code: &GkpCode, t: f64, tol: f64) -> Result<f64> {
    match code.origin() {
        Some(q) if q.r() > 0 => {
            let n2 = 2 * q.n();
            let stab = weight_distribution(&q.lattice_masks(), n2)?;
            let norm = weight_distribution(&q.normalizer_basis(), n2)?;
            // L = Λ(Q), L⊥ = Λ(N), both with |x|² = Σ 2(zᵢ + bᵢ/2)².
            let lhs = enumerator_value(&norm, t);
            let det = code.logical_dim() as f64;
            let rhs = det * t.powf(-(n2 as f64) / 2.0) * enumerator_value(&stab, 1.0 / t);
            Ok((lhs - rhs).abs())
        }
        _ => theta_dual_check(code.generator(), t, tol),
    }
}

/// Hamming weight distribution `A_w` of the span of `gens` (`len` bits).
pub fn weight_distribution(gens: &[u64], len: usize) -> Result<Vec<u128>> {
    if gens.len() > MAX_GROUP_BITS {
        return Err(Error::GroupTooLarge(gens.len()));
    }
    let mut a = vec![0u128; len + 1];
    gf2::for_each_in_span(gens, |v| a[v.count_ones() as usize] += 1);
    Ok(a)
}

/// `(Σ_v e^{−2πt v²}, Σ_v e^{−2πt (v+½)²})`.
fn local_sums(t: f64) -> (f64, f64) {
    let mut f0 = 1.0;
    let mut f1 = 0.0;
    for v in 1..200 {
        let a = (-2.0 * PI * t * (v * v) as f64).exp();
        let h = v as f64 - 0.5;
        let b = (-2.0 * PI * t * h * h).exp();
        f0 += 2.0 * a;
        f1 += 2.0 * b;
        if a == 0.0 && b == 0.0 {
            break;
        }
    }
    (f0, f1)
}

fn enumerator_value(a: &[u128], t: f64) -> f64 {
    let (f0, f1) = local_sums(t);
    let len = a.len() - 1;
    a.iter().enumerate().map(|(w, &c)| c as f64 * f0.powi((len - w) as i32) * f1.powi(w as i32)).sum()
}

/// Truncated polynomial in the integer exponent `2δ`.
fn poly_mul(x: &[u128], y: &[u128], max: usize) -> Result<Vec<u128>> {
    let mut out = vec![0u128; max + 1];
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            if i + j > max {
                break;
            }
            let p = a.checked_mul(b).ok_or_else(|| Error::InvalidArgument("theta count overflow".into()))?;
            out[i + j] = out[i + j].checked_add(p).ok_or_else(|| Error::InvalidArgument("theta count overflow".into()))?;
        }
    }
    Ok(out)
}

/// `Θ_{Λ(Q)} = W_Q(θ₃(2z), θ₂(2z))` up to `δ ≤ cutoff`.
pub fn theta_construction_a(q: &QubitStabilizerCode, cutoff: f64) -> Result<ThetaSeries> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("theta cutoff must be positive, got {cutoff}")));
    }
    let n2 = 2 * q.n();
    let a = weight_distribution(&q.lattice_masks(), n2)?;
    // Exponent key 2δ: θ₃(2z) has 2δ = 4v², θ₂(2z) has 2δ = (2v+1)².
    let max = (2.0 * cutoff + 1e-9).floor() as usize;
    let mut f0 = vec![0u128; max + 1];
    let mut f1 = vec![0u128; max + 1];
    for v in 0i64.. {
        let e0 = (4 * v * v) as usize;
        let e1 = ((2 * v + 1) * (2 * v + 1)) as usize;
        if e0 > max && e1 > max {
            break;
        }
        if e0 <= max {
            f0[e0] += if v == 0 { 1 } else { 2 };
        }
        if e1 <= max {
            f1[e1] += 2;
        }
    }
    // Powers f0^j and f1^j, j = 0..=2n.
    let powers = |f: &[u128]| -> Result<Vec<Vec<u128>>> {
        let mut p = vec![{
            let mut one = vec![0u128; max + 1];
            one[0] = 1;
            one
        }];
        for j in 1..=n2 {
            p.push(poly_mul(&p[j - 1], f, max)?);
        }
        Ok(p)
    };
    let p0 = powers(&f0)?;
    let p1 = powers(&f1)?;
    let mut total = vec![0u128; max + 1];
    for (w, &aw) in a.iter().enumerate() {
        if aw == 0 {
            continue;
        }
        let prod = poly_mul(&p0[n2 - w], &p1[w], max)?;
        for (t, p) in total.iter_mut().zip(prod) {
            *t += aw * p;
        }
    }
    let mut terms = Vec::new();
    for (e, &c) in total.iter().enumerate() {
        if c > 0 {
            let count = u64::try_from(c).map_err(|_| Error::InvalidArgument("theta count exceeds u64".into()))?;
            terms.push(ThetaTerm { delta: e as f64 / 2.0, count });
        }
    }
    Ok(ThetaSeries { terms, cutoff, dim: n2, exact_keys: true, max_shell_spread: 0.0 })
}

/// `Δ = √δ` for the first shell where `Θ_{L⊥}` exceeds `Θ_L`.
pub fn distance_from_theta(code: &GkpCode, cutoff: f64) -> Result<f64> {
    if code.logical_dim() == 1 {
        return Err(Error::TrivialCode);
    }
    let lat = theta_series(code.generator(), cutoff)?;
    let dual = theta_series(code.dual(), cutoff)?;
    for t in &dual.terms {
        if t.count > lat.count_at(t.delta) {
            return Ok(t.delta.sqrt());
        }
    }
    Err(Error::CutoffInsufficient { bound: cutoff, tol: cutoff })
}
