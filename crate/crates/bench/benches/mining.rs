use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use slimapi_bench::{fixture_model, synthetic_corpus};
use slimapi_core::usage::mine_sources;

fn mining(c: &mut Criterion) {
    let model = fixture_model("minilearn");
    let programs = synthetic_corpus(400, 40, 7);
    let mut group = c.benchmark_group("mine");
    group.throughput(Throughput::Elements(programs.len() as u64));
    for jobs in [1, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(jobs), &jobs, |b, &jobs| {
            b.iter(|| mine_sources(&programs, &model, jobs).expect("mining succeeds"))
        });
    }
    group.finish();
}

criterion_group!(benches, mining);
criterion_main!(benches);
