//! Syndromes, pure errors and the decoder family: minimum-energy (exact CVP
//! on `L⊥`), Babai rounding, coset maximum-likelihood, and the two-step
//! decoder for concatenated codes.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::code::{CosetLabel, GkpCode};
use crate::constructions::{QubitStabilizerCode, MAX_GROUP_BITS};
use crate::error::{Error, Result};
use crate::gf2;
use crate::lattice::{EnumOptions, GeneratorMatrix, MemberMode};

/// Below this `σ̃` coset likelihoods collapse onto the MED answer.
pub const MIN_SIGMA: f64 = 1e-4;

/// Default truncation factor `k` in `R = d + k·σ̃·√(2n)`.
pub const DEFAULT_TRUNC_K: f64 = 6.0;

/// Local shifts `|v| ≤ 3` in the two-step likelihood weights.
const LOCAL_SHIFTS: i64 = 3;

/// `MJe mod 1`, each component in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Syndrome(pub Vec<f64>);

impl Syndrome {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Componentwise distance on the circle `R/Z`.
    pub fn distance(&self, other: &Syndrome) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = (a - b).rem_euclid(1.0);
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Med,
    Babai,
    Mld,
    TwoStep,
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Med => "med",
            DecoderKind::Babai => "babai",
            DecoderKind::Mld => "mld",
            DecoderKind::TwoStep => "two-step",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "med" => Ok(DecoderKind::Med),
            "babai" => Ok(DecoderKind::Babai),
            "mld" => Ok(DecoderKind::Mld),
            "two-step" | "two_step" => Ok(DecoderKind::TwoStep),
            other => Err(Error::InvalidArgument(format!("unknown decoder {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodeOutcome {
    /// Estimated displacement `η̄` (syndrome-consistent).
    pub correction: Vec<f64>,
    /// Class of `η̄ − η(s)`, i.e. the logical shift chosen relative to the pure error.
    pub logical_label: CosetLabel,
    /// Normalized coset likelihoods (likelihood decoders only).
    pub coset_scores: Option<Vec<(CosetLabel, f64)>>,
    pub decoder: DecoderKind,
    /// Two or more cosets shared the maximal score.
    pub tie: bool,
}

/// `s(e) = MJe mod 1`.
pub fn syndrome(code: &GkpCode, e: &[f64]) -> Result<Syndrome> {
    let dim = 2 * code.n_modes();
    if e.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: e.len() });
    }
    let je = code.j() * DVector::from_column_slice(e);
    let s = code.generator().matrix() * je;
    Ok(Syndrome(s.iter().map(|x| frac(*x)).collect()))
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `η(s) = (MJ)⁻¹ s = −J M⁻¹ s`.
pub fn pure_error(code: &GkpCode, s: &Syndrome) -> Result<Vec<f64>> {
    let dim = 2 * code.n_modes();
    if s.0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: s.0.len() });
    }
    let y = code.generator().inverse() * DVector::from_column_slice(&s.0);
    let eta = -(code.j() * y);
    Ok(eta.iter().copied().collect())
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Minimum-energy decoding: `η̄ = η − CVP(η, L⊥)`.
pub fn decode_med(code: &GkpCode, s: &Syndrome, opts: &EnumOptions) -> Result<DecodeOutcome> {
    let eta = pure_error(code, s)?;
    let cv = code.dual().closest_vector(&eta, opts)?;
    let label = code.cosets().negate(&code.cosets().label_of_coeffs(&cv.coeffs));
    Ok(DecodeOutcome {
        correction: sub(&eta, &cv.point),
        logical_label: label,
        coset_scores: None,
        decoder: DecoderKind::Med,
        tie: false,
    })
}

/// Babai rounding in a caller-chosen basis of `L⊥`.
pub fn decode_babai(code: &GkpCode, s: &Syndrome, basis: &GeneratorMatrix) -> Result<DecodeOutcome> {
    let eta = pure_error(code, s)?;
    let p = basis.babai_round(&eta)?;
    let correction = sub(&eta, &p);
    let label = code.coset_label(&sub(&correction, &eta))?;
    Ok(DecodeOutcome { correction, logical_label: label, coset_scores: None, decoder: DecoderKind::Babai, tie: false })
}

/// Check that `basis` generates `L⊥` of `code`.
pub fn check_dual_basis(code: &GkpCode, basis: &GeneratorMatrix) -> Result<()> {
    if basis.same_lattice(code.dual())? {
        Ok(())
    } else {
        Err(Error::InvalidArgument("basis does not generate the dual lattice".into()))
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Argmax with ties (relative `1e-12` in log-space) to the lowest index.
fn argmax(log_scores: &[f64]) -> (usize, bool) {
    let mut best = 0;
    for (i, &x) in log_scores.iter().enumerate() {
        if x > log_scores[best] {
            best = i;
        }
    }
    let top = log_scores[best];
    let tol = 1e-12 * top.abs().max(1.0);
    let ties = log_scores.iter().filter(|&&x| (x - top).abs() <= tol).count();
    (best, ties > 1)
}

fn normalized(labels: Vec<CosetLabel>, log_scores: &[f64]) -> Vec<(CosetLabel, f64)> {
    let z = log_sum_exp(log_scores);
    labels.into_iter().zip(log_scores).map(|(l, &x)| (l, (x - z).exp())).collect()
}

/// Coset maximum-likelihood decoding for isotropic Gaussian noise `σ̃`.
///
/// Each coset score `Σ_{ξ∈L} exp(−‖η + ξ⊥_ℓ + ξ‖²/2σ̃²)` is summed over the
/// lattice points within `d_ℓ + k·σ̃·√(2n)` of the coset's nearest point.
pub fn decode_mld(code: &GkpCode, s: &Syndrome, sigma: f64, trunc_k: f64, opts: &EnumOptions) -> Result<DecodeOutcome> {
    if !(sigma >= MIN_SIGMA) {
        return Err(Error::DegenerateSigma(sigma));
    }
    let eta = pure_error(code, s)?;
    let lattice = code.generator();
    let search = lattice.search();
    let labels = code.cosets().labels();
    let width = trunc_k * sigma * ((2 * code.n_modes()) as f64).sqrt();
    let two_s2 = 2.0 * sigma * sigma;
    let mut log_scores = Vec::with_capacity(labels.len());
    let mut nearest = Vec::with_capacity(labels.len());
    for label in &labels {
        let shifted = add(&eta, &code.coset_representative(label));
        let center: Vec<f64> = shifted.iter().map(|x| -x).collect();
        let cv = lattice.closest_vector(&center, opts)?;
        let r = cv.dist2.sqrt() + width;
        let parts = search.visit_ball(Some(&center), r * r, opts, Vec::new, |acc: &mut Vec<f64>, _x, _p, d2| {
            acc.push(-d2 / two_s2)
        })?;
        let terms: Vec<f64> = parts.into_iter().flatten().collect();
        log_scores.push(log_sum_exp(&terms));
        nearest.push(add(&shifted, &cv.point));
    }
    let (best, tie) = argmax(&log_scores);
    if tie {
        log::debug!("mld: tied coset scores, keeping label {:?}", labels[best]);
    }
    Ok(DecodeOutcome {
        correction: nearest.swap_remove(best),
        logical_label: labels[best].clone(),
        coset_scores: Some(normalized(labels, &log_scores)),
        decoder: DecoderKind::Mld,
        tie,
    })
}

/// Local log-likelihoods `ln f(b | y)` for `b ∈ {0, 1}` with
/// `f(b | y) = Σ_{|v|≤3} exp(−(y + b + 2v)²/4σ̃²)`.
fn local_log_weights(y: f64, sigma: f64) -> [f64; 2] {
    let four_s2 = 4.0 * sigma * sigma;
    let w = |b: f64| {
        let xs: Vec<f64> = (-LOCAL_SHIFTS..=LOCAL_SHIFTS)
            .map(|v| {
                let z = y + b + 2.0 * v as f64;
                -z * z / four_s2
            })
            .collect();
        log_sum_exp(&xs)
    };
    [w(0.0), w(1.0)]
}

/// Running `ln Σ exp(xᵢ)`.
#[derive(Clone, Copy)]
struct OnlineLse {
    max: f64,
    sum: f64,
}

impl OnlineLse {
    fn new() -> Self {
        OnlineLse { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    fn push(&mut self, x: f64) {
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.sum.ln()
    }
}

/// Is `code` the Construction-A lattice `Λ(q)`?
fn is_construction_a_of(code: &GkpCode, q: &QubitStabilizerCode) -> Result<bool> {
    let dim = 2 * q.n();
    if code.n_modes() != q.n() || code.logical_dim() != 1u64 << q.k() {
        return Ok(false);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for row in q.lattice_rows() {
        let x: Vec<f64> = row.iter().map(|&b| b as f64 * h).collect();
        if !code.generator().member(&x, MemberMode::Auto)? {
            return Ok(false);
        }
    }
    for i in 0..dim {
        let x: Vec<f64> = (0..dim).map(|j| if i == j { 2.0 * h } else { 0.0 }).collect();
        if !code.generator().member(&x, MemberMode::Auto)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two-step decoding of a concatenated code: round to the local GKP dual
/// lattice `Z^{2n}/√2`, then run exact maximum-likelihood decoding of the
/// qubit code on the local likelihood weights.
pub fn decode_two_step(code: &GkpCode, q: &QubitStabilizerCode, s: &Syndrome, sigma: f64) -> Result<DecodeOutcome> {
    if !(sigma >= MIN_SIGMA) {
        return Err(Error::DegenerateSigma(sigma));
    }
    if q.r() > MAX_GROUP_BITS {
        return Err(Error::GroupTooLarge(q.r()));
    }
    if !is_construction_a_of(code, q)? {
        return Err(Error::InvalidArgument("code is not the concatenation of the given qubit code".into()));
    }
    let eta = pure_error(code, s)?;
    let sq2 = std::f64::consts::SQRT_2;
    // √2·η = r + y with r integer, y ∈ [−½, ½].
    let r: Vec<i64> = eta.iter().map(|x| (sq2 * x).round() as i64).collect();
    let y: Vec<f64> = eta.iter().zip(&r).map(|(x, &ri)| sq2 * x - ri as f64).collect();
    let r_mask = r.iter().enumerate().fold(0u64, |m, (i, &ri)| m | ((ri.rem_euclid(2) as u64) << i));
    let lw: Vec<[f64; 2]> = y.iter().map(|&yi| local_log_weights(yi, sigma)).collect();
    let stabs = q.lattice_masks();
    let logicals = q.logical_basis();
    let n_classes = 1usize << logicals.len();
    let mut class_scores = Vec::with_capacity(n_classes);
    let mut best_elems = Vec::with_capacity(n_classes);
    for cls in 0..n_classes {
        let shift = logicals.iter().enumerate().filter(|(i, _)| cls >> i & 1 == 1).fold(0u64, |m, (_, &l)| m ^ l);
        let mut lse = OnlineLse::new();
        let mut best = (f64::NEG_INFINITY, 0u64);
        gf2::for_each_in_span(&stabs, |g| {
            let bits = r_mask ^ shift ^ g;
            let x: f64 = lw.iter().enumerate().map(|(i, w)| w[(bits >> i & 1) as usize]).sum();
            lse.push(x);
            if x > best.0 {
                best = (x, bits);
            }
        });
        class_scores.push(lse.value());
        best_elems.push(best.1);
    }
    // Most likely displacement of a class: nearest y + b + 2v per coordinate.
    let representative = |bits: u64| -> Vec<f64> {
        y.iter()
            .enumerate()
            .map(|(i, &yi)| {
                let b = (bits >> i & 1) as f64;
                let v = (-(yi + b) / 2.0).round();
                (yi + b + 2.0 * v) / sq2
            })
            .collect()
    };
    let mut labels = Vec::with_capacity(n_classes);
    for &bits in &best_elems {
        labels.push(code.coset_label(&sub(&representative(bits), &eta))?);
    }
    let (best, tie) = argmax(&class_scores);
    if tie {
        log::debug!("two-step: tied class scores, keeping class {best}");
    }
    Ok(DecodeOutcome {
        correction: representative(best_elems[best]),
        logical_label: labels[best].clone(),
        coset_scores: Some(normalized(labels, &class_scores)),
        decoder: DecoderKind::TwoStep,
        tie,
    })
}
