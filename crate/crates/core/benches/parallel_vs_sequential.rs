use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gkplat_core::constructions::registry;
use gkplat_core::lattice::EnumOptions;
use gkplat_core::par::ExecPolicy;
use gkplat_core::sim::{run_trials, DecoderSpec, NoiseModel};

fn policies() -> [(&'static str, ExecPolicy); 2] {
    [("sequential", ExecPolicy::Sequential), ("parallel", ExecPolicy::default())]
}

fn enumeration(c: &mut Criterion) {
    let dual = registry::code("surface17").unwrap().dual().clone();
    let mut group = c.benchmark_group("enumerate_surface17_dual");
    for (name, policy) in policies() {
        let opts = EnumOptions::with_policy(policy);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| dual.enumerate_short_vectors(black_box(3.0), None, &opts).unwrap())
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let code = registry::code("surface17").unwrap();
    let spec = DecoderSpec::Med;
    let model = NoiseModel::isotropic(0.15).unwrap();
    let mut group = c.benchmark_group("simulate_surface17_med");
    group.sample_size(10);
    for (name, policy) in policies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_trials(&code, &spec, &model, black_box(1024), 1, policy).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, simulation);
criterion_main!(benches);
