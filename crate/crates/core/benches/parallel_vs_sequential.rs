use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sperner_eq::economy::{CobbDouglas, Consumer};
use sperner_eq::exec::Execution;
use sperner_eq::labeling::Labeling;
use sperner_eq::simplex_grid::Subdivision;
use sperner_eq::solver::label_grid;
use sperner_eq::sperner_search::enumerate_fully_labeled_with;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn enumeration(c: &mut Criterion) {
    let sub = Subdivision::new(2, 96).unwrap();
    let lab = Labeling::random_proper(sub, &mut ChaCha8Rng::seed_from_u64(1));
    let mut group = c.benchmark_group("enumerate_n2_m96");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| enumerate_fully_labeled_with(&lab, exec).unwrap())
        });
    }
    group.finish();
}

fn labeling(c: &mut Criterion) {
    let econ = CobbDouglas::new(vec![
        Consumer {
            alpha: vec![0.5, 0.3, 0.2],
            endowment: vec![1.0, 0.0, 1.0],
        },
        Consumer {
            alpha: vec![0.2, 0.2, 0.6],
            endowment: vec![0.0, 1.0, 0.0],
        },
    ])
    .unwrap();
    let sub = Subdivision::new(2, 128).unwrap();
    let mut group = c.benchmark_group("label_grid_n2_m128");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| label_grid(&econ, sub, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, labeling);
criterion_main!(benches);
