use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mgas_core::bench::{run_class, BenchParams};
use mgas_core::gkls::GklsClassSpec;
use mgas_core::parallel::{map_indices, Execution};
use mgas_core::run::Algorithm;
use mgas_core::CurveMap;

fn class_runs(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_class");
    group.sample_size(10);
    let spec = GklsClassSpec::preset(2).unwrap();
    for exec in [Execution::Sequential, Execution::Parallel] {
        for algo in [Algorithm::Mgas, Algorithm::Direct] {
            let params = BenchParams::default()
                .with_max_trials(10_000)
                .with_execution(exec);
            group.bench_with_input(
                BenchmarkId::new(format!("{algo}/{exec:?}"), 100),
                &params,
                |b, p| b.iter(|| run_class(algo, &spec, 100, p).unwrap()),
            );
        }
    }
    group.finish();
}

fn curve_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("curve_map");
    let cm = CurveMap::unit(4, 10).unwrap();
    let n = 200_000;
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}/{n}"), |b| {
            b.iter(|| map_indices(n, exec, |i| cm.map(i as f64 / n as f64).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, class_runs, curve_batch);
criterion_main!(benches);
