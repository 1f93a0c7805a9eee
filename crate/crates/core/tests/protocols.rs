use std::collections::HashSet;

use proptest::prelude::*;
use ssllab::classifier::{Classifier, Trainer};
use ssllab::datagen::{derive_seed, generate_two_class_gaussian};
use ssllab::eval::*;
use ssllab::{Dataset, TrainingData};

fn gaussian(n: usize, seed: u64) -> Dataset {
    generate_two_class_gaussian(n, 2, 1.0, true, seed).unwrap()
}

fn ls() -> NamedTrainer {
    NamedTrainer::new("ls", Classifier::LeastSquares { lambda: 0.0 })
}

fn self_learning() -> NamedTrainer {
    NamedTrainer::new(
        "self-ls",
        Classifier::SelfLearning {
            base: Box::new(Classifier::LeastSquares { lambda: 0.0 }),
            max_iter: 100,
        },
    )
}

#[test]
fn mar_labeled_count_is_binomial() {
    let d = gaussian(1000, 1);
    let seeds = 1000;
    let total: usize = (0..seeds)
        .map(|s| add_missing_labels_mar(&d, 0.995, s).unwrap().labeled_count())
        .sum();
    let mean = total as f64 / seeds as f64;
    assert!((mean - 5.0).abs() <= 0.7, "mean labeled count {mean}");
}

#[test]
fn mar_extremes_and_recovery() {
    let d = gaussian(30, 2);
    assert_eq!(add_missing_labels_mar(&d, 0.0, 5).unwrap(), d);
    let none = add_missing_labels_mar(&d, 1.0, 5).unwrap();
    assert_eq!(none.labeled_count(), 0);
    assert_eq!(true_labels(&none, &d).unwrap(), d.complete_labels().unwrap());
    assert!(true_labels(&d, &d).unwrap().is_empty());
    assert!(add_missing_labels_mar(&d, 1.5, 5).is_err());
    assert!(add_missing_labels_mar(&none, 0.5, 5).is_err());
}

#[test]
fn true_labels_positional_lookup() {
    let d = Dataset::from_names(
        nalgebra::DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]),
        &[Some("A"), Some("B"), Some("B")],
        None,
    )
    .unwrap();
    let mut labels: Vec<Option<usize>> = d.labels().to_vec();
    labels[1] = None;
    let missing = d.with_labels(labels).unwrap();
    assert_eq!(true_labels(&missing, &d).unwrap(), vec![1]);
    let other = gaussian(3, 99);
    assert!(matches!(true_labels(&missing, &other), Err(ssllab::Error::Provenance(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn splits_are_disjoint(n_l in 2usize..10, n_u in 0usize..20, n_test in 0usize..20, seed: u64) {
        let d = gaussian(50, 4);
        let s = split_dataset_ssl(&d, n_l, n_u, n_test, 1, seed).unwrap();
        let idx = &s.indices;
        prop_assert_eq!(idx.labeled.len(), n_l);
        prop_assert_eq!(idx.unlabeled.len(), n_u);
        prop_assert_eq!(idx.test.len(), n_test);
        let all: HashSet<usize> = idx.labeled.iter().chain(&idx.unlabeled).chain(&idx.test).copied().collect();
        prop_assert_eq!(all.len(), n_l + n_u + n_test);
        let labels = d.complete_labels().unwrap();
        let ones = idx.labeled.iter().filter(|&&r| labels[r] == 1).count();
        prop_assert!(ones >= 1 && ones < n_l);
        prop_assert_eq!(s.unlabeled.labeled_count(), 0);
        let hidden: Vec<usize> = idx.unlabeled.iter().map(|&r| labels[r]).collect();
        prop_assert_eq!(s.unlabeled_labels, hidden);
    }
}

#[test]
fn two_labels_force_one_per_class() {
    let d = gaussian(40, 5);
    let labels = d.complete_labels().unwrap();
    for seed in 0..50 {
        let s = split_indices(&d, 2, 5, 5, 1, seed).unwrap();
        let mut classes: Vec<usize> = s.labeled.iter().map(|&r| labels[r]).collect();
        classes.sort();
        assert_eq!(classes, vec![0, 1]);
    }
    assert!(matches!(split_indices(&d, 10, 20, 11, 1, 0), Err(ssllab::Error::Infeasible(_))));
    assert!(matches!(split_indices(&d, 2, 0, 0, 2, 0), Err(ssllab::Error::Infeasible(_))));
}

fn small_plan(sizes: Vec<usize>, repeats: usize, jobs: usize) -> TrialPlan {
    TrialPlan {
        base_seed: 42,
        repeats,
        n_labeled: 6,
        sizes,
        measures: Measure::ALL.to_vec(),
        classifiers: vec![ls(), self_learning()],
        jobs,
    }
}

#[test]
fn learning_curve_bookkeeping() {
    let data = vec![("g1".to_string(), gaussian(80, 6)), ("g2".to_string(), gaussian(60, 7))];
    let plan = small_plan(vec![2, 4, 8, 16], 3, 2);
    let res = learning_curve_ssl(&data, &plan).unwrap();
    assert_eq!(res.records.len(), 2 * 2 * 3 * 4 * 3);
    assert!(res.failures.is_empty());
    assert!(res.records.iter().all(|r| r.value.is_some_and(f64::is_finite)));
    // supervised test-set measures do not move with the pool size
    for r in 0..3 {
        let at = |size| {
            res.records
                .iter()
                .find(|x| x.dataset == "g1" && x.classifier == "ls" && x.repeat == r && x.size == size && x.measure == Measure::Error)
                .unwrap()
                .value
        };
        assert_eq!(at(2), at(16));
    }
}

#[test]
fn learning_curve_matches_hand_rolled_trial() {
    let d = gaussian(40, 8);
    let plan = TrialPlan {
        base_seed: 9,
        repeats: 1,
        n_labeled: 4,
        sizes: vec![2],
        measures: Measure::ALL.to_vec(),
        classifiers: vec![ls()],
        jobs: 1,
    };
    let res = learning_curve_ssl(&[("g".to_string(), d.clone())], &plan).unwrap();

    let seed = derive_seed(9, &[0, 0]);
    let idx = split_indices(&d, 4, 2, 40 - 4 - 2, 1, seed).unwrap();
    let labels = d.complete_labels().unwrap();
    let sel = |rows: &[usize]| {
        let x = nalgebra::DMatrix::from_fn(rows.len(), 2, |i, j| d.features()[(rows[i], j)]);
        let y: Vec<usize> = rows.iter().map(|&r| labels[r]).collect();
        (x, y)
    };
    let (x_l, y_l) = sel(&idx.labeled);
    let (x_u, y_u) = sel(&idx.unlabeled);
    let (x_t, y_t) = sel(&idx.test);
    let train = TrainingData::supervised(x_l.clone(), y_l.clone(), d.classes().clone()).unwrap();
    let m = Classifier::LeastSquares { lambda: 0.0 }.fit(&train).unwrap();
    let err = measure_error(&m, &x_t, &y_t).unwrap();
    let loss = measure_loss_test(&m, &x_t, &y_t).unwrap();
    let mut x_all = x_l.clone().resize_vertically(6, 0.0);
    x_all.rows_mut(4, 2).copy_from(&x_u);
    let mut y_all = y_l.clone();
    y_all.extend(&y_u);
    let loss_all = m.mean_loss(&x_all, &y_all).unwrap();

    let got = |measure| res.values("g", "ls", 2, measure)[0].unwrap();
    assert_eq!(got(Measure::Error), err);
    assert_eq!(got(Measure::LossTest), loss);
    assert!((got(Measure::LossAll) - loss_all).abs() < 1e-12);
}

#[test]
fn standard_plan_leaves_966_test_rows() {
    let d = gaussian(2000, 10);
    let idx = split_indices(&d, 10, 1024, 2000 - 10 - 1024, 1, 0).unwrap();
    assert_eq!(idx.test.len(), 966);
}

#[test]
fn learning_curve_pools_are_nested_and_test_fixed() {
    // a size-s pool is the prefix of the largest pool drawn for the repeat
    let d = gaussian(30, 11);
    let idx = split_indices(&d, 4, 16, 10, 1, derive_seed(1, &[0, 0])).unwrap();
    let pools: Vec<&[usize]> = [2, 4, 8, 16].iter().map(|&s| &idx.unlabeled[..s]).collect();
    for w in pools.windows(2) {
        assert!(w[0].iter().all(|r| w[1].contains(r)));
    }
    let test: HashSet<_> = idx.test.iter().collect();
    assert!(idx.labeled.iter().chain(&idx.unlabeled).all(|r| !test.contains(r)));
}

#[test]
fn learning_curve_is_parallelism_invariant() {
    let data = vec![("g".to_string(), gaussian(70, 12))];
    let a = learning_curve_ssl(&data, &small_plan(vec![2, 8], 4, 1)).unwrap();
    let b = learning_curve_ssl(&data, &small_plan(vec![2, 8], 4, 4)).unwrap();
    assert_eq!(a.to_csv_string(), b.to_csv_string());
}

#[test]
fn learning_curve_rejects_infeasible_plans() {
    let data = vec![("g".to_string(), gaussian(20, 13))];
    assert!(learning_curve_ssl(&data, &small_plan(vec![14], 1, 1)).is_err());
    assert!(learning_curve_ssl(&data, &small_plan(vec![4, 2], 1, 1)).is_err());
    assert!(learning_curve_ssl(&data, &small_plan(vec![], 1, 1)).is_err());
}

#[test]
fn trainer_failures_become_missing_values() {
    // LDA without regularization is singular for collinear features
    let x = nalgebra::DMatrix::from_fn(40, 2, |i, j| if j == 0 { i as f64 } else { 2.0 * i as f64 });
    let labels = (0..40).map(|i| Some(usize::from(i >= 20))).collect();
    let d = Dataset::new(x, labels, ssllab::ClassOrder::new("A", "B").unwrap()).unwrap();
    let plan = TrialPlan {
        base_seed: 1,
        repeats: 2,
        n_labeled: 6,
        sizes: vec![2, 4],
        measures: vec![Measure::Error],
        classifiers: vec![NamedTrainer::new("lda", Classifier::Lda { reg: 0.0 }), ls()],
        jobs: 1,
    };
    let res = learning_curve_ssl(&[("line".to_string(), d)], &plan).unwrap();
    assert_eq!(res.records.len(), 2 * 2 * 2);
    let lda: Vec<_> = res.records.iter().filter(|r| r.classifier == "lda").collect();
    assert!(lda.iter().all(|r| r.value.is_none()));
    assert!(!res.failures.is_empty());
    assert!(res.to_csv_string().lines().any(|l| l.ends_with("error,")));
}

#[test]
fn cross_validation_bookkeeping() {
    let data = vec![("g".to_string(), gaussian(33, 14))];
    let plan = CvPlan {
        base_seed: 3,
        repeats: 2,
        k_folds: 5,
        n_labeled: 8,
        measures: vec![Measure::Error, Measure::LossTest],
        classifiers: vec![ls(), self_learning()],
        jobs: 2,
    };
    let res = cross_validation_ssl(&data, &plan).unwrap();
    assert_eq!(res.records.len(), 5 * 2 * 2 * 2);
    let folds: HashSet<usize> = res.records.iter().map(|r| r.size).collect();
    assert_eq!(folds, (0..5).collect());
}

#[test]
fn csv_layout() {
    let data = vec![("g,1".to_string(), gaussian(30, 15))];
    let plan = TrialPlan {
        base_seed: 1,
        repeats: 1,
        n_labeled: 4,
        sizes: vec![2],
        measures: vec![Measure::Error],
        classifiers: vec![ls()],
        jobs: 1,
    };
    let csv = learning_curve_ssl(&data, &plan).unwrap().to_csv_string();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "dataset,classifier,repeat,size,measure,value");
    assert!(lines[1].starts_with("\"g,1\",ls,0,2,error,"));
    assert!(!csv.contains('\r'));
}

#[test]
fn measures_on_trivial_predictors() {
    let d = gaussian(20, 16);
    let (train, _) = ssllab::split_labeled_unlabeled(&d);
    let m = Classifier::LeastSquares { lambda: 0.0 }.fit(&train).unwrap();
    let pred = m.predict(&train.x_l).unwrap();
    assert_eq!(measure_error(&m, &train.x_l, &pred).unwrap(), 0.0);
    let flipped: Vec<usize> = pred.iter().map(|p| 1 - p).collect();
    assert_eq!(measure_error(&m, &train.x_l, &flipped).unwrap(), 1.0);
    let empty = nalgebra::DMatrix::zeros(0, 2);
    assert!(measure_error(&m, &empty, &[]).is_err());
}
