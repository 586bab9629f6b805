use cluster_core::theta::{default_base_point, theta};
use cluster_core::{catalog, Expander, LatticeVec, ScatteringDiagram};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn mutation(c: &mut Criterion) {
    let a3 = catalog::a3();
    c.bench_function("mutate/a3_word_8", |b| {
        b.iter(|| {
            let mut s = a3.clone();
            for k in [0, 1, 2, 0, 1, 2, 0, 1] {
                s = s.mutate(k).unwrap();
            }
            black_box(s)
        })
    });

    let mut group = c.benchmark_group("expand");
    for seed in ["a3", "kronecker"] {
        let s = catalog::by_name(seed).unwrap();
        let word: Vec<usize> = s.unfrozen().iter().cycle().take(6).copied().collect();
        let ex = Expander::new(s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(seed), &word, |b, w| b.iter(|| black_box(ex.run(w).unwrap())));
    }
    group.finish();
}

fn completion(c: &mut Criterion) {
    let kr = catalog::kronecker().classical();
    let mut group = c.benchmark_group("complete/kronecker");
    for order in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, &k| {
            b.iter(|| black_box(ScatteringDiagram::complete(&kr, k).unwrap()))
        });
    }
    group.finish();
}

fn theta_functions(c: &mut Criterion) {
    let d = ScatteringDiagram::complete(&catalog::kronecker().classical(), 6).unwrap();
    let q = default_base_point(2);
    let mut group = c.benchmark_group("theta/kronecker");
    for m in [[-1i64, 1], [-2, 1], [-2, 2]] {
        let m = LatticeVec(m.to_vec());
        group.bench_with_input(BenchmarkId::from_parameter(format!("{:?}", m.0)), &m, |b, m| {
            b.iter(|| black_box(theta(&d, m, &q).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, mutation, completion, theta_functions);
criterion_main!(benches);
