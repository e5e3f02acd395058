use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ellsurf::golden::verify_table;
use ellsurf::parallel::Execution;
use ellsurf::sections::torsion_search_with;
use ellsurf::weierstrass::WeierstrassModel;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_table");
    group.sample_size(10);
    for id in ["igusa", "char3", "order4"] {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, id), &id, |b, id| {
                b.iter(|| verify_table(black_box(id), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn torsion(c: &mut Criterion) {
    let cases = [
        ("order7", WeierstrassModel::from_strs(7, ["0", "0", "0", "t", "5*t^12"]).unwrap(), 7, 4),
        ("order8", WeierstrassModel::from_strs(2, ["t^2", "0", "0", "1", "t^4"]).unwrap(), 8, 8),
    ];
    let mut group = c.benchmark_group("torsion_search");
    group.sample_size(10);
    for (label, model, order, bound) in &cases {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, label), model, |b, m| {
                b.iter(|| torsion_search_with(black_box(m), *order, *bound, mode).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, tables, torsion);
criterion_main!(benches);
