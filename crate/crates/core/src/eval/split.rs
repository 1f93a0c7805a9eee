use rand::seq::SliceRandom;

use super::MAX_SPLIT_ATTEMPTS;
use crate::data::Dataset;
use crate::datagen::rng_from_seed;
use crate::error::{Error, Result};

/// Row indices of a labeled / unlabeled / test partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub test: Vec<usize>,
}

/// A split of a fully labeled dataset. The unlabeled part has its labels
/// removed; they are kept in `unlabeled_labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct SslSplit {
    pub labeled: Dataset,
    pub unlabeled: Dataset,
    pub unlabeled_labels: Vec<usize>,
    pub test: Dataset,
    pub indices: SplitIndices,
}

pub(crate) fn has_min_per_class(labels: &[usize], rows: &[usize], min_per_class: usize) -> bool {
    let ones = rows.iter().filter(|&&r| labels[r] == 1).count();
    ones >= min_per_class && rows.len() - ones >= min_per_class
}

/// Shuffle `rows` until the first `n_l` entries hold at least `min_per_class`
/// rows of each class.
pub(crate) fn shuffle_with_labeled_prefix<R: rand::Rng>(
    rows: &mut [usize],
    labels: &[usize],
    n_l: usize,
    min_per_class: usize,
    rng: &mut R,
) -> Result<()> {
    if 2 * min_per_class > n_l {
        return Err(Error::Infeasible(format!(
            "{n_l} labeled points cannot hold {min_per_class} per class"
        )));
    }
    if !has_min_per_class(labels, rows, min_per_class) {
        return Err(Error::Infeasible(format!(
            "fewer than {min_per_class} candidate rows in some class"
        )));
    }
    for _ in 0..MAX_SPLIT_ATTEMPTS {
        rows.shuffle(rng);
        if has_min_per_class(labels, &rows[..n_l], min_per_class) {
            return Ok(());
        }
    }
    Err(Error::Infeasible(format!(
        "no labeled set with {min_per_class} per class after {MAX_SPLIT_ATTEMPTS} attempts"
    )))
}

/// Uniformly sample disjoint labeled, unlabeled and test rows. The labeled rows
/// are redrawn until each class has at least `min_per_class` of them.
pub fn split_indices(
    d: &Dataset,
    n_l: usize,
    n_u: usize,
    n_test: usize,
    min_per_class: usize,
    seed: u64,
) -> Result<SplitIndices> {
    let labels = d.complete_labels()?;
    let n = d.len();
    if n_l + n_u + n_test > n {
        return Err(Error::Infeasible(format!(
            "{n_l} + {n_u} + {n_test} rows requested from {n}"
        )));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(seed);
    shuffle_with_labeled_prefix(&mut rows, &labels, n_l, min_per_class, &mut rng)?;
    Ok(SplitIndices {
        labeled: rows[..n_l].to_vec(),
        unlabeled: rows[n_l..n_l + n_u].to_vec(),
        test: rows[n_l + n_u..n_l + n_u + n_test].to_vec(),
    })
}

pub fn split_dataset_ssl(
    d: &Dataset,
    n_l: usize,
    n_u: usize,
    n_test: usize,
    min_per_class: usize,
    seed: u64,
) -> Result<SslSplit> {
    let indices = split_indices(d, n_l, n_u, n_test, min_per_class, seed)?;
    let unlabeled_full = d.select(&indices.unlabeled);
    let unlabeled_labels = unlabeled_full.complete_labels()?;
    Ok(SslSplit {
        labeled: d.select(&indices.labeled),
        unlabeled: unlabeled_full.unlabeled(),
        unlabeled_labels,
        test: d.select(&indices.test),
        indices,
    })
}
