use gkplat_core::constructions::registry;
use gkplat_core::decoder::DecoderKind;
use gkplat_core::par::ExecPolicy;
use gkplat_core::sim::{
    run_grid, run_trial, run_trials, sample_error, sigma_grid, sigma_physical, BabaiBasis, DecoderSpec, NoiseModel,
    SimPoint, TrialOutcome,
};

fn point(name: &str, spec: &DecoderSpec, model: &NoiseModel, trials: u64, seed: u64) -> SimPoint {
    let code = registry::code(name).unwrap();
    run_trials(&code, spec, model, trials, seed, ExecPolicy::default()).unwrap().points.remove(0)
}

#[test]
fn isotropic_second_moment() {
    let sigma = 0.3;
    let model = NoiseModel::isotropic(sigma).unwrap();
    let dim = 6;
    let n = 100_000;
    let mean: f64 = (0..n)
        .map(|t| sample_error(&model, dim, 9, t).unwrap().iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        / n as f64;
    // ‖e‖²/σ̃² is χ² with 2n degrees of freedom: variance 2·dim.
    let want = dim as f64 * sigma * sigma;
    let se = (2.0 * dim as f64).sqrt() * sigma * sigma / (n as f64).sqrt();
    assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} ± {se}");
}

#[test]
fn biased_variance_ratio() {
    let model = NoiseModel::biased(0.3, 2.0, 2).unwrap();
    let (mut vq, mut vp) = (0.0, 0.0);
    let n = 100_000;
    for t in 0..n {
        let e = sample_error(&model, 4, 10, t).unwrap();
        vq += e[0] * e[0] + e[1] * e[1];
        vp += e[2] * e[2] + e[3] * e[3];
    }
    let ratio = vq / vp;
    assert!((ratio - 0.25).abs() < 0.05 * 0.25, "{ratio}");
}

#[test]
fn draws_are_reproducible() {
    let model = NoiseModel::isotropic(0.2).unwrap();
    let a: Vec<_> = (0..10).map(|t| sample_error(&model, 4, 77, t).unwrap()).collect();
    let b: Vec<_> = (0..10).map(|t| sample_error(&model, 4, 77, t).unwrap()).collect();
    assert_eq!(a, b);
    assert_ne!(a[0], a[1]);
    assert_ne!(a[0], sample_error(&model, 4, 78, 0).unwrap());
}

#[test]
fn noise_model_validation() {
    assert!(NoiseModel::isotropic(0.0).is_err());
    assert!(NoiseModel::isotropic(-0.1).is_err());
    assert!(NoiseModel::biased(0.1, 0.0, 1).is_err());
    assert!(NoiseModel::isotropic(0.1).unwrap().with_diagonal(vec![0.1, -0.1]).is_err());
    let m = NoiseModel::isotropic(0.1).unwrap().with_diagonal(vec![0.1, 0.2]).unwrap();
    assert!(sample_error(&m, 4, 0, 0).is_err());
    assert!((sigma_physical(1.0) - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
}

#[test]
fn report_fields() {
    let p = point("square", &DecoderSpec::Med, &NoiseModel::isotropic(0.3).unwrap(), 2000, 1);
    assert_eq!((p.code.as_str(), p.decoder.as_str(), p.trials, p.seed), ("square", "med", 2000, 1));
    assert!((p.rate - p.failures as f64 / 2000.0).abs() < 1e-15);
    assert!((p.stderr - (p.rate * (1.0 - p.rate) / 2000.0).sqrt()).abs() < 1e-15);
    assert!((p.sigma_physical - sigma_physical(0.3)).abs() < 1e-15);

    let code = registry::code("square").unwrap();
    let grid = sigma_grid(0.1, 0.3, 3).unwrap();
    let report = run_grid(&code, &DecoderSpec::Med, &grid, 100, 4, ExecPolicy::Sequential).unwrap();
    let csv = report.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "code,decoder,sigma_tilde,sigma_physical,trials,failures,rate,stderr,decoder_error_count,seed"
    );
    assert_eq!(lines.count(), 3);
    assert!(run_trials(&code, &DecoderSpec::Med, &NoiseModel::isotropic(0.1).unwrap(), 0, 1, ExecPolicy::Sequential).is_err());
}

#[test]
fn independent_of_worker_count() {
    let code = registry::code("rep3").unwrap();
    let model = NoiseModel::isotropic(0.35).unwrap();
    let spec = DecoderSpec::for_code(DecoderKind::TwoStep, &code).unwrap();
    let runs: Vec<_> = [ExecPolicy::Sequential, ExecPolicy::Parallel { threads: Some(3) }, ExecPolicy::default()]
        .into_iter()
        .map(|p| run_trials(&code, &spec, &model, 3000, 21, p).unwrap().points)
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn tiny_noise_never_fails() {
    let model = NoiseModel::isotropic(0.01).unwrap();
    for name in registry::CODE_NAMES {
        let p = point(name, &DecoderSpec::Med, &model, 10_000, 2);
        assert_eq!((p.failures, p.decoder_error_count), (0, 0), "{name}");
    }
}

#[test]
fn residuals_stay_in_the_dual_for_every_decoder() {
    for name in ["rep3", "rep2", "hexagonal"] {
        let code = registry::code(name).unwrap();
        let model = NoiseModel::isotropic(0.3).unwrap();
        let mut specs = vec![
            DecoderSpec::Med,
            DecoderSpec::Babai(BabaiBasis::Canonical),
            DecoderSpec::Babai(BabaiBasis::Reduced),
            DecoderSpec::Mld { trunc_k: 6.0 },
        ];
        if code.origin().is_some() {
            specs.push(DecoderSpec::for_code(DecoderKind::TwoStep, &code).unwrap());
        }
        for spec in &specs {
            for t in 0..200 {
                // run_trial errors out if the residual leaves L⊥.
                let out = run_trial(&code, spec, &model, 3, t).unwrap();
                assert_ne!(out, TrialOutcome::DecoderError, "{name} {:?}", spec.kind());
            }
        }
    }
}

#[test]
fn med_rate_grows_with_noise() {
    let code = registry::code("rep3").unwrap();
    let grid = sigma_grid(0.15, 0.45, 5).unwrap();
    let report = run_grid(&code, &DecoderSpec::Med, &grid, 5000, 8, ExecPolicy::default()).unwrap();
    for w in report.points.windows(2) {
        let se = w[0].stderr.hypot(w[1].stderr);
        assert!(w[1].rate >= w[0].rate - 3.0 * se, "{} → {}", w[0].rate, w[1].rate);
    }
    assert!(report.points.last().unwrap().rate > report.points[0].rate);
}

#[test]
fn mld_is_never_worse_than_med() {
    for name in ["hexagonal", "rep2"] {
        for sigma in [0.25, 0.35, 0.45] {
            let model = NoiseModel::isotropic(sigma).unwrap();
            let mld = point(name, &DecoderSpec::Mld { trunc_k: 6.0 }, &model, 4000, 12);
            let med = point(name, &DecoderSpec::Med, &model, 4000, 12);
            assert!(mld.rate <= med.rate + 3.0 * med.stderr, "{name} σ̃={sigma}: {} vs {}", mld.rate, med.rate);
        }
    }
}

#[test]
fn squeezing_covariance() {
    // Squeezing q by 1/η and p by η, against noise with q/p variance ratio 1/η⁴.
    let eta = 1.5;
    let sq = registry::code("square").unwrap();
    let squeezed = sq.squeezed(eta).unwrap();
    for sigma in [0.25, 0.35] {
        let plain = run_trials(&sq, &DecoderSpec::Med, &NoiseModel::isotropic(sigma).unwrap(), 20_000, 30, ExecPolicy::default())
            .unwrap()
            .points
            .remove(0);
        let biased = NoiseModel::biased(sigma, eta * eta, 1).unwrap();
        let moved = run_trials(&squeezed, &DecoderSpec::Med, &biased, 20_000, 31, ExecPolicy::default()).unwrap().points.remove(0);
        let se = plain.stderr.hypot(moved.stderr);
        assert!((plain.rate - moved.rate).abs() <= 3.0 * se, "σ̃={sigma}: {} vs {}", plain.rate, moved.rate);
    }
}

#[test]
fn two_step_beats_babai_on_repetition_code() {
    let code = registry::code("rep3").unwrap();
    let model = NoiseModel::isotropic(0.1).unwrap();
    let ts = point("rep3", &DecoderSpec::for_code(DecoderKind::TwoStep, &code).unwrap(), &model, 10_000, 40);
    for basis in [BabaiBasis::Canonical, BabaiBasis::Reduced] {
        let b = point("rep3", &DecoderSpec::Babai(basis), &model, 10_000, 40);
        assert!(ts.failures <= b.failures, "two-step {} > Babai {}", ts.failures, b.failures);
    }
}
