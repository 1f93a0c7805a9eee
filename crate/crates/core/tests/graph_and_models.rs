use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use ssllab::classifier::{Classifier, Trainer};
use ssllab::graph::propagate_labels;
use ssllab::*;

fn points(n: usize, seed: u64) -> DMatrix<f64> {
    let d = datagen::generate_two_circles(n / 2, 0.2, seed).unwrap();
    d.features().clone()
}

fn path_graph(n: usize) -> Graph {
    let w = DMatrix::from_fn(n, n, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 });
    Graph::from_weights(w, false).unwrap()
}

#[test]
fn path_graph_harmonic_values() {
    let f3 = harmonic_energy_min(&path_graph(3), &[0, 2], &DVector::from_vec(vec![0.0, 1.0]), &[1]).unwrap();
    assert!((f3[0] - 0.5).abs() < 1e-15);
    let f4 = harmonic_energy_min(&path_graph(4), &[0, 3], &DVector::from_vec(vec![0.0, 1.0]), &[1, 2]).unwrap();
    assert!((f4[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((f4[1] - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn two_point_weight() {
    let x = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
    let g = build_graph(&x, &GraphConfig::full(WeightScale::Fixed(1.0))).unwrap();
    assert!((g.weights[(0, 1)] - (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn knn_neighbor_counts_match_brute_force() {
    let x = DMatrix::from_fn(10, 2, |i, j| ((i * 7 + j * 3) as f64 * 1.37).sin());
    let g = build_graph(&x, &GraphConfig::knn(3, WeightScale::Fixed(1.0))).unwrap();
    let dist = |a: usize, b: usize| (x.row(a) - x.row(b)).norm();
    let nearest: Vec<Vec<usize>> = (0..10)
        .map(|i| {
            let mut o: Vec<usize> = (0..10).filter(|&j| j != i).collect();
            o.sort_by(|&a, &b| dist(i, a).total_cmp(&dist(i, b)));
            o.truncate(3);
            o
        })
        .collect();
    for i in 0..10 {
        let nnz = (0..10).filter(|&j| g.weights[(i, j)] != 0.0).count();
        assert!((3..=9).contains(&nnz), "row {i}: {nnz}");
        for j in 0..10 {
            let edge = nearest[i].contains(&j) || nearest[j].contains(&i);
            assert_eq!(g.weights[(i, j)] != 0.0, edge, "({i}, {j})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graph_invariants(seed: u64, k in 3usize..8) {
        let x = points(30, seed);
        let g = build_graph(&x, &GraphConfig::knn(k, WeightScale::KnnMedian)).unwrap();
        for i in 0..30 {
            prop_assert_eq!(g.weights[(i, i)], 0.0);
            prop_assert!(g.laplacian.row(i).sum().abs() < 1e-10);
            for j in 0..30 {
                prop_assert!((g.weights[(i, j)] - g.weights[(j, i)]).abs() <= 1e-12);
                prop_assert!(g.weights[(i, j)] >= 0.0);
            }
        }
        let eig = g.laplacian.clone().symmetric_eigenvalues();
        prop_assert!(eig.min() > -1e-9);
    }

    #[test]
    fn harmonic_properties(seed: u64, scale in 0.01f64..100.0) {
        let x = points(30, seed);
        let w = build_graph(&x, &GraphConfig::full(WeightScale::PairwiseMedian)).unwrap().weights;
        let g = Graph::from_weights(w.clone(), false).unwrap();
        let labeled = [0, 1, 15, 16];
        let f_l = DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0]);
        let unlabeled: Vec<usize> = (0..30).filter(|i| !labeled.contains(i)).collect();
        let f_u = harmonic_energy_min(&g, &labeled, &f_l, &unlabeled).unwrap();
        prop_assert!(f_u.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));

        let mut f = DVector::zeros(30);
        for (&i, &v) in labeled.iter().zip(f_l.iter()) { f[i] = v; }
        for (&i, &v) in unlabeled.iter().zip(f_u.iter()) { f[i] = v; }
        for &i in &unlabeled {
            let avg = g.weights.row(i).transpose().dot(&f) / g.degrees[i];
            prop_assert!((f[i] - avg).abs() < 1e-8);
        }

        let scaled = Graph::from_weights(w * scale, false).unwrap();
        let f_s = harmonic_energy_min(&scaled, &labeled, &f_l, &unlabeled).unwrap();
        prop_assert!((f_s - &f_u).amax() < 1e-10);

        let (f_p, _) = propagate_labels(&g, &labeled, &f_l, &unlabeled, 1e-10, 1_000_000).unwrap();
        prop_assert!((f_p - &f_u).amax() < 1e-8);
    }

    #[test]
    fn icls_without_unlabeled_is_least_squares(seed: u64, lambda in 0.0f64..1.0) {
        let d = datagen::generate_two_class_gaussian(12, 2, 1.0, true, seed).unwrap();
        let (train, _) = split_labeled_unlabeled(&d);
        let probe = points(20, seed);
        let ls = Classifier::LeastSquares { lambda }.fit(&train).unwrap();
        for c in [
            Classifier::Icls { lambda, settings: OptimSettings::default() },
            Classifier::IclsProjection { lambda, settings: OptimSettings::default() },
            Classifier::UpdatedSecondMoment { lambda },
        ] {
            let m = c.fit(&train).unwrap();
            let diff = m.decision_values(&probe).unwrap() - ls.decision_values(&probe).unwrap();
            prop_assert!(diff.amax() < 1e-8, "{:?}", c.family());
        }
    }

    #[test]
    fn surrogate_losses_are_nonnegative(seed: u64) {
        let d = datagen::generate_two_class_gaussian(16, 2, 1.0, false, seed).unwrap();
        let (train, _) = split_labeled_unlabeled(&d);
        for c in [
            Classifier::LeastSquares { lambda: 0.1 },
            Classifier::Logistic { lambda: 0.1, settings: OptimSettings::default() },
            Classifier::Svm { kernel: Kernel::Linear, c: 1.0, settings: OptimSettings::default() },
        ] {
            let m = c.fit(&train).unwrap();
            let loss = m.loss(&train.x_l, &train.y_l).unwrap();
            prop_assert!(loss.iter().all(|&l| l >= 0.0 && l.is_finite()));
        }
    }
}

#[test]
fn linear_boundary_lies_on_zero_decision() {
    let d = datagen::generate_two_class_gaussian(40, 2, 1.0, true, 3).unwrap();
    let (train, _) = split_labeled_unlabeled(&d);
    let m = Classifier::LeastSquares { lambda: 0.0 }.fit(&train).unwrap();
    let Boundary::Line { intercept, slope } = m.line_coefficients().unwrap() else {
        panic!("expected a non-vertical line");
    };
    let xs = DMatrix::from_fn(5, 2, |i, j| {
        let x1 = i as f64 - 2.0;
        if j == 0 { x1 } else { intercept + slope * x1 }
    });
    assert!(m.decision_values(&xs).unwrap().amax() < 1e-9);
}

#[test]
fn disconnected_unlabeled_component_is_an_error() {
    let mut w = DMatrix::zeros(4, 4);
    w[(0, 1)] = 1.0;
    w[(1, 0)] = 1.0;
    w[(2, 3)] = 1.0;
    w[(3, 2)] = 1.0;
    let g = Graph::from_weights(w, false).unwrap();
    let r = harmonic_energy_min(&g, &[0], &DVector::from_vec(vec![1.0]), &[1, 2, 3]);
    assert!(matches!(r, Err(Error::Connectivity(_))));
}
