use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;
use ssllab::datagen::{generate_crescent_moon, generate_two_class_gaussian};
use ssllab::eval::add_missing_labels_mar;
use ssllab::semi::{train_icls, train_laplacian_svm};
use ssllab::{
    build_graph, gram_matrix, harmonic_energy_min, split_labeled_unlabeled, GraphConfig, Kernel, LapParams,
    OptimSettings, WeightScale,
};
use std::hint::black_box;

fn gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram_rbf");
    for n in [100, 400] {
        let x = generate_two_class_gaussian(n, 10, 1.0, true, 1).unwrap().features().clone();
        let k = Kernel::Rbf { sigma: 0.1 };
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| gram_matrix(&k, black_box(x), x).unwrap())
        });
    }
    g.finish();
}

fn harmonic(c: &mut Criterion) {
    let mut g = c.benchmark_group("harmonic");
    for n in [100, 400] {
        let x = generate_crescent_moon(n / 2, 0.3, 2).unwrap().features().clone();
        let graph = build_graph(&x, &GraphConfig::knn(10, WeightScale::KnnMedian)).unwrap();
        let labeled = vec![0, n - 1];
        let unlabeled: Vec<usize> = (1..n - 1).collect();
        let f_l = DVector::from_vec(vec![0.0, 1.0]);
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| harmonic_energy_min(&graph, &labeled, black_box(&f_l), &unlabeled).unwrap())
        });
    }
    g.finish();
}

fn icls(c: &mut Criterion) {
    let full = generate_two_class_gaussian(1000, 2, 1.0, false, 3).unwrap();
    let missing = add_missing_labels_mar(&full, 0.98, 4).unwrap();
    let (data, _) = split_labeled_unlabeled(&missing);
    let s = OptimSettings::default();
    c.bench_function("icls_1000", |b| b.iter(|| train_icls(black_box(&data), 0.0, &s).unwrap()));
}

fn lapsvm(c: &mut Criterion) {
    let unl = generate_crescent_moon(100, 0.3, 5).unwrap();
    let missing = add_missing_labels_mar(&unl, 0.95, 6).unwrap();
    let (data, _) = split_labeled_unlabeled(&missing);
    let p = LapParams { lambda: 1e-4, gamma: 10.0 };
    let graph = GraphConfig::knn(10, WeightScale::KnnMedian);
    let s = OptimSettings::default();
    c.bench_function("lapsvm_200", |b| {
        b.iter(|| train_laplacian_svm(black_box(&data), Kernel::Rbf { sigma: 0.05 }, &p, &graph, &s).unwrap())
    });
}

criterion_group!(benches, gram, harmonic, icls, lapsvm);
criterion_main!(benches);
