//! Monte-Carlo estimation of logical error rates under Gaussian displacement
//! noise.
//!
//! Trial `i` of a run with seed `s` always draws its error from the ChaCha8
//! stream `(s, i)`, so results do not depend on how trials are split across
//! workers, and runs with the same seed are paired across decoders.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::code::{CosetSystem, GkpCode};
use crate::constructions::QubitStabilizerCode;
use crate::decoder::{self, DecodeOutcome, DecoderKind, DEFAULT_TRUNC_K};
use crate::error::{Error, Result};
use crate::lattice::{EnumOptions, GeneratorMatrix};
use crate::par::ExecPolicy;

/// Trials handed to one worker job.
const CHUNK: usize = 256;

/// Environment variable overriding any requested worker count.
pub const THREADS_ENV: &str = "GKPLAT_THREADS";

/// Centered Gaussian displacements with per-quadrature deviation `σ̃`,
/// optionally with a separate deviation for each of the `2n` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    sigma: f64,
    diagonal: Option<Vec<f64>>,
}

impl NoiseModel {
    pub fn isotropic(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Ok(NoiseModel { sigma, diagonal: None })
    }

    /// Covariance `σ̃²(η⁻¹I_n ⊕ ηI_n)`.
    pub fn biased(sigma: f64, eta: f64, n_modes: usize) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::InvalidArgument(format!("bias {eta} must be positive")));
        }
        let (sq, sp) = (sigma / eta.sqrt(), sigma * eta.sqrt());
        let diag = (0..2 * n_modes).map(|i| if i < n_modes { sq } else { sp }).collect();
        NoiseModel::isotropic(sigma)?.with_diagonal(diag)
    }

    /// Per-coordinate standard deviations (not variances).
    pub fn with_diagonal(mut self, diag: Vec<f64>) -> Result<Self> {
        if diag.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument("covariance entries must be positive".into()));
        }
        self.diagonal = Some(diag);
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diagonal.as_deref()
    }

    /// Physical standard deviation `σ = √(2π)·σ̃`.
    pub fn sigma_physical(&self) -> f64 {
        sigma_physical(self.sigma)
    }

    fn std_dev(&self, i: usize) -> f64 {
        self.diagonal.as_ref().map_or(self.sigma, |d| d[i])
    }

    /// Draw a `dim`-component error from `rng`.
    pub fn sample(&self, rng: &mut ChaCha8Rng, dim: usize) -> Result<Vec<f64>> {
        if let Some(d) = &self.diagonal {
            if d.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: d.len() });
            }
        }
        Ok((0..dim)
            .map(|i| {
                let z: f64 = StandardNormal.sample(rng);
                z * self.std_dev(i)
            })
            .collect())
    }
}

pub fn sigma_physical(sigma_tilde: f64) -> f64 {
    (2.0 * std::f64::consts::PI).sqrt() * sigma_tilde
}

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The error drawn in trial `trial`.
pub fn sample_error(model: &NoiseModel, dim: usize, seed: u64, trial: u64) -> Result<Vec<f64>> {
    model.sample(&mut trial_rng(seed, trial), dim)
}

/// Which basis of `L⊥` Babai rounding works in.
#[derive(Clone, Debug)]
pub enum BabaiBasis {
    /// The canonical dual basis `M⊥` of the code's generator.
    Canonical,
    /// `L⊥` basis whose euclidean dual is LLL-reduced (`δ = 0.99`); see
    /// [`GeneratorMatrix::rounding_reduced`].
    Reduced,
    Custom(GeneratorMatrix),
}

#[derive(Clone, Debug)]
pub enum DecoderSpec {
    Med,
    Babai(BabaiBasis),
    /// Likelihoods use the noise model's `σ̃`.
    Mld { trunc_k: f64 },
    TwoStep(QubitStabilizerCode),
}

impl DecoderSpec {
    pub fn kind(&self) -> DecoderKind {
        match self {
            DecoderSpec::Med => DecoderKind::Med,
            DecoderSpec::Babai(_) => DecoderKind::Babai,
            DecoderSpec::Mld { .. } => DecoderKind::Mld,
            DecoderSpec::TwoStep(_) => DecoderKind::TwoStep,
        }
    }

    /// Default spec for a decoder kind; two-step needs the qubit code the
    /// GKP code was concatenated from.
    pub fn for_code(kind: DecoderKind, code: &GkpCode) -> Result<Self> {
        Ok(match kind {
            DecoderKind::Med => DecoderSpec::Med,
            DecoderKind::Babai => DecoderSpec::Babai(BabaiBasis::Reduced),
            DecoderKind::Mld => DecoderSpec::Mld { trunc_k: DEFAULT_TRUNC_K },
            DecoderKind::TwoStep => match code.origin() {
                Some(q) => DecoderSpec::TwoStep(q.clone()),
                None => {
                    return Err(Error::InvalidArgument(
                        "two-step decoding needs a code built by concatenation".into(),
                    ))
                }
            },
        })
    }
}

/// A decoder with its per-code setup done once.
enum Prepared<'a> {
    Med,
    Babai(GeneratorMatrix),
    Mld(f64),
    TwoStep(&'a QubitStabilizerCode),
}

fn prepare<'a>(code: &GkpCode, spec: &'a DecoderSpec) -> Result<Prepared<'a>> {
    Ok(match spec {
        DecoderSpec::Med => Prepared::Med,
        DecoderSpec::Babai(BabaiBasis::Canonical) => Prepared::Babai(code.dual().clone()),
        DecoderSpec::Babai(BabaiBasis::Reduced) => Prepared::Babai(code.dual().rounding_reduced(0.99)?),
        DecoderSpec::Babai(BabaiBasis::Custom(b)) => {
            decoder::check_dual_basis(code, b)?;
            Prepared::Babai(b.clone())
        }
        DecoderSpec::Mld { trunc_k } => Prepared::Mld(*trunc_k),
        DecoderSpec::TwoStep(q) => Prepared::TwoStep(q),
    })
}

fn decode(code: &GkpCode, p: &Prepared, s: &decoder::Syndrome, sigma: f64) -> Result<DecodeOutcome> {
    // Trials already run in parallel; searches inside one decode stay sequential.
    let opts = EnumOptions::sequential();
    match p {
        Prepared::Med => decoder::decode_med(code, s, &opts),
        Prepared::Babai(b) => decoder::decode_babai(code, s, b),
        Prepared::Mld(k) => decoder::decode_mld(code, s, sigma, *k, &opts),
        Prepared::TwoStep(q) => decoder::decode_two_step(code, q, s, sigma),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    LogicalFailure,
    /// The decoder gave up (e.g. an enumeration cap); not a logical failure.
    DecoderError,
}

/// Run one trial: sample, decode, classify the residual `e − η̄`.
pub fn run_trial(code: &GkpCode, spec: &DecoderSpec, model: &NoiseModel, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let p = prepare(code, spec)?;
    trial_outcome(code, &p, model, seed, trial)
}

fn trial_outcome(code: &GkpCode, p: &Prepared, model: &NoiseModel, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let e = sample_error(model, 2 * code.n_modes(), seed, trial)?;
    let s = decoder::syndrome(code, &e)?;
    let out = match decode(code, p, &s, model.sigma()) {
        Ok(out) => out,
        Err(err @ (Error::RadiusTooLarge { .. } | Error::DegenerateSigma(_))) => {
            log::debug!("trial {trial}: decoder error: {err}");
            return Ok(TrialOutcome::DecoderError);
        }
        Err(err) => return Err(err),
    };
    let residual: Vec<f64> = e.iter().zip(&out.correction).map(|(a, b)| a - b).collect();
    // Fails with NotInDualLattice if the correction was syndrome-inconsistent.
    let label = code.coset_label(&residual)?;
    Ok(if CosetSystem::is_zero(&label) { TrialOutcome::Success } else { TrialOutcome::LogicalFailure })
}

/// Aggregate of one `(σ̃, decoder)` campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimPoint {
    pub code: String,
    pub decoder: String,
    pub sigma_tilde: f64,
    pub sigma_physical: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub stderr: f64,
    pub decoder_error_count: u64,
    pub seed: u64,
}

impl SimPoint {
    fn new(code: &str, decoder: DecoderKind, sigma: f64, trials: u64, failures: u64, errors: u64, seed: u64) -> Self {
        let rate = failures as f64 / trials as f64;
        SimPoint {
            code: code.to_string(),
            decoder: decoder.to_string(),
            sigma_tilde: sigma,
            sigma_physical: sigma_physical(sigma),
            trials,
            failures,
            rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
            decoder_error_count: errors,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub points: Vec<SimPoint>,
    /// Seconds; kept out of the CSV so that output is reproducible.
    pub wall_time: f64,
}

impl SimReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.points {
            w.serialize(p).map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

/// `trials` Monte-Carlo trials at one noise model.
pub fn run_trials(
    code: &GkpCode,
    spec: &DecoderSpec,
    model: &NoiseModel,
    trials: u64,
    seed: u64,
    policy: ExecPolicy,
) -> Result<SimReport> {
    let start = Instant::now();
    let point = run_point(code, spec, model, trials, seed, policy)?;
    Ok(SimReport { points: vec![point], wall_time: start.elapsed().as_secs_f64() })
}

fn run_point(
    code: &GkpCode,
    spec: &DecoderSpec,
    model: &NoiseModel,
    trials: u64,
    seed: u64,
    policy: ExecPolicy,
) -> Result<SimPoint> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let prepared = prepare(code, spec)?;
    let n_chunks = trials.div_ceil(CHUNK as u64) as usize;
    let chunks = policy.map_indexed(n_chunks, |c| -> Result<(u64, u64)> {
        let lo = c as u64 * CHUNK as u64;
        let hi = (lo + CHUNK as u64).min(trials);
        let (mut failures, mut errors) = (0, 0);
        for t in lo..hi {
            match trial_outcome(code, &prepared, model, seed, t)? {
                TrialOutcome::Success => {}
                TrialOutcome::LogicalFailure => failures += 1,
                TrialOutcome::DecoderError => errors += 1,
            }
        }
        Ok((failures, errors))
    });
    let (mut failures, mut errors) = (0, 0);
    for c in chunks {
        let (f, e) = c?;
        failures += f;
        errors += e;
    }
    Ok(SimPoint::new(code.name(), spec.kind(), model.sigma(), trials, failures, errors, seed))
}

/// One isotropic campaign per `σ̃` in `sigmas`, all with the same seed.
pub fn run_grid(
    code: &GkpCode,
    spec: &DecoderSpec,
    sigmas: &[f64],
    trials: u64,
    seed: u64,
    policy: ExecPolicy,
) -> Result<SimReport> {
    let start = Instant::now();
    let points = sigmas
        .iter()
        .map(|&s| run_point(code, spec, &NoiseModel::isotropic(s)?, trials, seed, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimReport { points, wall_time: start.elapsed().as_secs_f64() })
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn sigma_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::InvalidArgument("grid needs at least one point".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

/// Worker policy for a requested thread count; `GKPLAT_THREADS` wins.
pub fn policy_from_env(requested: Option<usize>) -> ExecPolicy {
    let env = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    ExecPolicy::with_threads(env.or(requested))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let m = NoiseModel::isotropic(0.3).unwrap();
        let a = sample_error(&m, 4, 7, 0).unwrap();
        assert_eq!(a, sample_error(&m, 4, 7, 0).unwrap());
        assert_ne!(a, sample_error(&m, 4, 7, 1).unwrap());
        assert_ne!(a, sample_error(&m, 4, 8, 0).unwrap());
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(sigma_grid(0.1, 0.3, 3).unwrap().len(), 3);
        assert!((sigma_grid(0.1, 0.3, 3).unwrap()[2] - 0.3).abs() < 1e-15);
        assert!(sigma_grid(0.1, 0.3, 0).is_err());
    }

    #[test]
    fn stderr_formula() {
        let p = SimPoint::new("x", DecoderKind::Med, 0.1, 100, 10, 0, 1);
        assert!((p.stderr - (0.1f64 * 0.9 / 100.0).sqrt()).abs() < 1e-15);
    }
}
