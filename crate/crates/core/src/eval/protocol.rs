use std::collections::HashSet;

use rayon::prelude::*;

use super::measures::{Measure, Trial};
use super::results::{ExperimentResult, Record, TrialFailure};
use super::split::{shuffle_with_labeled_prefix, split_indices};
use crate::classifier::Trainer;
use crate::data::{select_rows, Dataset, TrainingData};
use crate::datagen::{derive_seed, rng_from_seed};
use crate::error::{Error, Result};
use crate::model::TrainedModel;
use rand::seq::SliceRandom;

/// A trainer with the name used in result records.
pub struct NamedTrainer {
    pub name: String,
    pub trainer: Box<dyn Trainer>,
}

impl NamedTrainer {
    pub fn new(name: impl Into<String>, trainer: impl Trainer + 'static) -> Self {
        NamedTrainer {
            name: name.into(),
            trainer: Box::new(trainer),
        }
    }
}

impl std::fmt::Debug for NamedTrainer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NamedTrainer").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Learning-curve experiment: `n_labeled` labeled points and unlabeled pools of
/// increasing `sizes`.
#[derive(Debug)]
pub struct TrialPlan {
    pub base_seed: u64,
    pub repeats: usize,
    pub n_labeled: usize,
    pub sizes: Vec<usize>,
    pub measures: Vec<Measure>,
    pub classifiers: Vec<NamedTrainer>,
    /// Worker threads; 0 uses the global rayon pool.
    pub jobs: usize,
}

/// Repeated k-fold cross-validation with `n_labeled` labeled points drawn from
/// the training folds.
#[derive(Debug)]
pub struct CvPlan {
    pub base_seed: u64,
    pub repeats: usize,
    pub k_folds: usize,
    pub n_labeled: usize,
    pub measures: Vec<Measure>,
    pub classifiers: Vec<NamedTrainer>,
    pub jobs: usize,
}

/// Sort key: (dataset, classifier, repeat, size, measure) positions.
type Key = (usize, usize, usize, usize, usize);

#[derive(Default)]
struct TrialOutput {
    records: Vec<(Key, Record)>,
    failures: Vec<(Key, TrialFailure)>,
}

struct Cell<'a> {
    dataset: &'a str,
    dataset_idx: usize,
    classifier_idx: usize,
    classifier: &'a str,
    repeat: usize,
    size: usize,
}

impl TrialOutput {
    fn record(&mut self, cell: &Cell, model: &Result<TrainedModel>, trial: &Trial, measures: &[Measure]) {
        let key = |mi| (cell.dataset_idx, cell.classifier_idx, cell.repeat, cell.size, mi);
        let mut messages = Vec::new();
        if let Err(e) = model {
            messages.push(e.to_string());
        }
        for (mi, &measure) in measures.iter().enumerate() {
            let value = match model {
                Ok(m) => match measure.evaluate(m, trial) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        messages.push(format!("{}: {e}", measure.name()));
                        None
                    }
                },
                Err(_) => None,
            };
            self.records.push((
                key(mi),
                Record {
                    dataset: cell.dataset.to_string(),
                    classifier: cell.classifier.to_string(),
                    repeat: cell.repeat,
                    size: cell.size,
                    measure,
                    value,
                },
            ));
        }
        if !messages.is_empty() {
            self.failures.push((
                key(0),
                TrialFailure {
                    dataset: cell.dataset.to_string(),
                    classifier: cell.classifier.to_string(),
                    repeat: cell.repeat,
                    size: cell.size,
                    message: messages.join("; "),
                },
            ));
        }
    }
}

fn check_common(
    datasets: &[(String, Dataset)],
    repeats: usize,
    measures: &[Measure],
    classifiers: &[NamedTrainer],
) -> Result<()> {
    if datasets.is_empty() || repeats == 0 || measures.is_empty() || classifiers.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one dataset, repeat, measure and classifier".into(),
        ));
    }
    let mut seen = HashSet::new();
    if let Some(c) = classifiers.iter().find(|c| !seen.insert(c.name.as_str())) {
        return Err(Error::InvalidArgument(format!("duplicate classifier name '{}'", c.name)));
    }
    let mut seen = HashSet::new();
    if let Some((name, _)) = datasets.iter().find(|(name, _)| !seen.insert(name.as_str())) {
        return Err(Error::InvalidArgument(format!("duplicate dataset name '{name}'")));
    }
    for (_, d) in datasets {
        d.complete_labels()?;
    }
    Ok(())
}

fn run_trials<F>(jobs: usize, n_datasets: usize, repeats: usize, f: F) -> Result<ExperimentResult>
where
    F: Fn(usize, usize) -> Result<TrialOutput> + Sync,
{
    let trials: Vec<(usize, usize)> = (0..n_datasets)
        .flat_map(|d| (0..repeats).map(move |r| (d, r)))
        .collect();
    let run = || -> Vec<Result<TrialOutput>> { trials.par_iter().map(|&(d, r)| f(d, r)).collect() };
    let outputs = if jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} worker threads: {e}")))?
            .install(run)
    };
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for out in outputs {
        let out = out?;
        records.extend(out.records);
        failures.extend(out.failures);
    }
    records.sort_by_key(|(k, _)| *k);
    failures.sort_by_key(|(k, _)| *k);
    Ok(ExperimentResult {
        records: records.into_iter().map(|(_, r)| r).collect(),
        failures: failures.into_iter().map(|(_, f)| f).collect(),
    })
}

fn needs_test_rows(measures: &[Measure]) -> bool {
    measures.iter().any(|m| *m != Measure::LossAll)
}

/// Run a learning-curve experiment on each dataset.
///
/// Per dataset and repeat, a seed is derived from `(base_seed, dataset index,
/// repeat)`; `n_labeled` labeled rows (at least one per class) and a shuffled
/// pool of `max(sizes)` unlabeled rows are drawn and all remaining rows form the
/// test set. For each size, every classifier is trained on the labeled rows plus
/// the first `size` pool rows. Supervised trainers are fit once per repeat.
/// Trainer and measure failures become missing values listed in `failures`.
pub fn learning_curve_ssl(datasets: &[(String, Dataset)], plan: &TrialPlan) -> Result<ExperimentResult> {
    check_common(datasets, plan.repeats, &plan.measures, &plan.classifiers)?;
    if plan.n_labeled < 2 {
        return Err(Error::InvalidArgument("need at least 2 labeled points".into()));
    }
    if plan.sizes.is_empty() || plan.sizes[0] == 0 || plan.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sizes must be positive and strictly increasing".into(),
        ));
    }
    let max_size = *plan.sizes.last().expect("nonempty");
    for (name, d) in datasets {
        let used = plan.n_labeled + max_size;
        if used > d.len() || (used == d.len() && needs_test_rows(&plan.measures)) {
            return Err(Error::Infeasible(format!(
                "dataset '{name}' has {} rows; {} labeled plus {max_size} unlabeled leave no test set",
                d.len(),
                plan.n_labeled
            )));
        }
    }
    run_trials(plan.jobs, datasets.len(), plan.repeats, |di, repeat| {
        let (name, d) = &datasets[di];
        let seed = derive_seed(plan.base_seed, &[di as u64, repeat as u64]);
        let n_test = d.len() - plan.n_labeled - max_size;
        let idx = split_indices(d, plan.n_labeled, max_size, n_test, 1, seed)?;
        let labels = d.complete_labels()?;
        let pick = |rows: &[usize]| -> (nalgebra::DMatrix<f64>, Vec<usize>) {
            (select_rows(d.features(), rows), rows.iter().map(|&r| labels[r]).collect())
        };
        let (x_l, y_l) = pick(&idx.labeled);
        let (x_test, y_test) = pick(&idx.test);
        let trials = plan
            .sizes
            .iter()
            .map(|&s| {
                let (x_u, y_u) = pick(&idx.unlabeled[..s]);
                Ok(Trial {
                    train: TrainingData::new(x_l.clone(), y_l.clone(), x_u, d.classes().clone())?,
                    y_u,
                    x_test: x_test.clone(),
                    y_test: y_test.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = TrialOutput::default();
        for (ci, c) in plan.classifiers.iter().enumerate() {
            let supervised_fit = (!c.trainer.uses_unlabeled())
                .then(|| c.trainer.fit(&trials[0].train.without_unlabeled()));
            for (trial, &size) in trials.iter().zip(&plan.sizes) {
                let cell = Cell {
                    dataset: name,
                    dataset_idx: di,
                    classifier_idx: ci,
                    classifier: &c.name,
                    repeat,
                    size,
                };
                match &supervised_fit {
                    Some(m) => out.record(&cell, m, trial, &plan.measures),
                    None => out.record(&cell, &c.trainer.fit(&trial.train), trial, &plan.measures),
                }
            }
        }
        Ok(out)
    })
}

/// Repeated k-fold cross-validation. Per repeat the rows are shuffled and cut
/// into `k_folds` folds whose sizes differ by at most one. For each held-out
/// fold, `n_labeled` rows of the remaining folds (at least one per class) are
/// labeled and the rest are unlabeled. Records use the fold index as `size`.
pub fn cross_validation_ssl(datasets: &[(String, Dataset)], plan: &CvPlan) -> Result<ExperimentResult> {
    check_common(datasets, plan.repeats, &plan.measures, &plan.classifiers)?;
    let k = plan.k_folds;
    if k < 2 {
        return Err(Error::InvalidArgument("need at least 2 folds".into()));
    }
    if plan.n_labeled < 2 {
        return Err(Error::InvalidArgument("need at least 2 labeled points".into()));
    }
    for (name, d) in datasets {
        let n = d.len();
        if k > n {
            return Err(Error::Infeasible(format!("{k} folds for {n} rows of '{name}'")));
        }
        let smallest_train = n - n.div_ceil(k);
        if plan.n_labeled > smallest_train {
            return Err(Error::Infeasible(format!(
                "{} labeled points requested but some training folds of '{name}' have {smallest_train} rows",
                plan.n_labeled
            )));
        }
    }
    run_trials(plan.jobs, datasets.len(), plan.repeats, |di, repeat| {
        let (name, d) = &datasets[di];
        let labels = d.complete_labels()?;
        let n = d.len();
        let seed = derive_seed(plan.base_seed, &[di as u64, repeat as u64]);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng_from_seed(seed));
        let (base, extra) = (n / k, n % k);
        let mut out = TrialOutput::default();
        let mut start = 0;
        for fold in 0..k {
            let len = base + usize::from(fold < extra);
            let test = &perm[start..start + len];
            let mut train: Vec<usize> = perm[..start].iter().chain(&perm[start + len..]).copied().collect();
            start += len;
            let mut rng = rng_from_seed(derive_seed(seed, &[fold as u64]));
            shuffle_with_labeled_prefix(&mut train, &labels, plan.n_labeled, 1, &mut rng)?;
            let (lab, unl) = train.split_at(plan.n_labeled);
            let pick = |rows: &[usize]| rows.iter().map(|&r| labels[r]).collect::<Vec<_>>();
            let trial = Trial {
                train: TrainingData::new(
                    select_rows(d.features(), lab),
                    pick(lab),
                    select_rows(d.features(), unl),
                    d.classes().clone(),
                )?,
                y_u: pick(unl),
                x_test: select_rows(d.features(), test),
                y_test: pick(test),
            };
            for (ci, c) in plan.classifiers.iter().enumerate() {
                let cell = Cell {
                    dataset: name,
                    dataset_idx: di,
                    classifier_idx: ci,
                    classifier: &c.name,
                    repeat,
                    size: fold,
                };
                let data = if c.trainer.uses_unlabeled() {
                    trial.train.clone()
                } else {
                    trial.train.without_unlabeled()
                };
                out.record(&cell, &c.trainer.fit(&data), &trial, &plan.measures);
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Classifier;
    use crate::datagen::generate_two_class_gaussian;

    fn ls() -> NamedTrainer {
        NamedTrainer::new("ls", Classifier::LeastSquares { lambda: 0.0 })
    }

    #[test]
    fn record_count() {
        let d = generate_two_class_gaussian(60, 2, 1.0, true, 1).unwrap();
        let plan = TrialPlan {
            base_seed: 3,
            repeats: 2,
            n_labeled: 6,
            sizes: vec![2, 8, 16],
            measures: vec![Measure::Error, Measure::LossAll],
            classifiers: vec![
                ls(),
                NamedTrainer::new("usm", Classifier::UpdatedSecondMoment { lambda: 0.0 }),
            ],
            jobs: 1,
        };
        let r = learning_curve_ssl(&[("g".into(), d)], &plan).unwrap();
        assert_eq!(r.records.len(), 2 * 2 * 3 * 2);
    }

    #[test]
    fn rejects_bad_plans() {
        let d = generate_two_class_gaussian(20, 2, 1.0, true, 1).unwrap();
        let mut plan = TrialPlan {
            base_seed: 0,
            repeats: 1,
            n_labeled: 4,
            sizes: vec![8, 4],
            measures: vec![Measure::Error],
            classifiers: vec![ls()],
            jobs: 1,
        };
        let data = [("g".to_string(), d)];
        assert!(learning_curve_ssl(&data, &plan).is_err());
        plan.sizes = vec![16];
        assert!(matches!(learning_curve_ssl(&data, &plan), Err(Error::Infeasible(_))));
        plan.measures = vec![Measure::LossAll];
        assert!(learning_curve_ssl(&data, &plan).is_ok());
    }

    #[test]
    fn fold_sizes_differ_by_at_most_one() {
        let d = generate_two_class_gaussian(23, 2, 1.0, true, 1).unwrap();
        let plan = CvPlan {
            base_seed: 0,
            repeats: 1,
            k_folds: 5,
            n_labeled: 4,
            measures: vec![Measure::Error],
            classifiers: vec![ls()],
            jobs: 1,
        };
        let r = cross_validation_ssl(&[("g".into(), d)], &plan).unwrap();
        assert_eq!(r.records.len(), 5);
    }
}
