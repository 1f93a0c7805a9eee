//! Similarity graphs, graph Laplacians and harmonic label propagation.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::data::{split_labeled_unlabeled, Dataset, Target};
use crate::error::{Error, Result};
use crate::optim::solve_linear;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    /// Every pair of distinct points is connected.
    FullRbf,
    /// Each point connects to its `k` nearest neighbors (Euclidean, self excluded).
    Knn { k: usize },
}

/// Edge weights are `exp(-s * ||x_i - x_j||^2)`; this picks `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightScale {
    Fixed(f64),
    /// `s = 1 / (2 m^2)` with `m` the median pairwise distance.
    PairwiseMedian,
    /// `s = 1 / (2 m^2)` with `m` the median distance to the k-th nearest neighbor
    /// (knn graphs only).
    KnnMedian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConfig {
    pub adjacency: Adjacency,
    pub weights: WeightScale,
    /// `true`: `w_ij = max(w_ij, w_ji)`; `false`: keep mutual neighbors only (`min`).
    pub symmetrize: bool,
    /// Use `I - D^-1/2 W D^-1/2` instead of `D - W`.
    pub normalized_laplacian: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            adjacency: Adjacency::Knn { k: 10 },
            weights: WeightScale::PairwiseMedian,
            symmetrize: true,
            normalized_laplacian: false,
        }
    }
}

impl GraphConfig {
    pub fn knn(k: usize, weights: WeightScale) -> Self {
        GraphConfig {
            adjacency: Adjacency::Knn { k },
            weights,
            ..GraphConfig::default()
        }
    }

    pub fn with_k(self, k: usize) -> Self {
        GraphConfig {
            adjacency: Adjacency::Knn { k },
            ..self
        }
    }

    pub fn full(weights: WeightScale) -> Self {
        GraphConfig {
            adjacency: Adjacency::FullRbf,
            weights,
            ..GraphConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub weights: DMatrix<f64>,
    pub degrees: DVector<f64>,
    pub laplacian: DMatrix<f64>,
}

impl Graph {
    /// Graph from an explicit symmetric weight matrix (diagonal ignored).
    pub fn from_weights(mut w: DMatrix<f64>, normalized: bool) -> Result<Self> {
        let n = w.nrows();
        if w.ncols() != n {
            return Err(Error::Shape(format!("weight matrix is {}x{}", n, w.ncols())));
        }
        for i in 0..n {
            w[(i, i)] = 0.0;
            for j in 0..i {
                if !(w[(i, j)] >= 0.0 && w[(i, j)].is_finite()) || w[(i, j)] != w[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "weights must be finite, nonnegative and symmetric (entry {i},{j})"
                    )));
                }
            }
        }
        let degrees = w.column_sum();
        if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::Connectivity(format!("vertex {v} has no edges")));
        }
        let laplacian = if normalized {
            let s = degrees.map(|d| 1.0 / d.sqrt());
            DMatrix::from_fn(n, n, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id - s[i] * w[(i, j)] * s[j]
            })
        } else {
            DMatrix::from_diagonal(&degrees) - &w
        };
        Ok(Graph {
            weights: w,
            degrees,
            laplacian,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn squared_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut d2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (x.row(i) - x.row(j)).norm_squared();
            d2[(i, j)] = v;
            d2[(j, i)] = v;
        }
    }
    d2
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Indices of the `k` nearest other points of row `i`; ties go to the lower index.
fn neighbors(d2: &DMatrix<f64>, i: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d2.nrows()).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| d2[(i, a)].total_cmp(&d2[(i, b)]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

fn weight_scale(cfg: &GraphConfig, d2: &DMatrix<f64>, knn: &[Vec<usize>]) -> Result<f64> {
    let n = d2.nrows();
    let s = match cfg.weights {
        WeightScale::Fixed(s) => s,
        WeightScale::PairwiseMedian => {
            let mut d = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    d.push(d2[(i, j)].sqrt());
                }
            }
            let m = median(d);
            1.0 / (2.0 * m * m)
        }
        WeightScale::KnnMedian => {
            if knn.is_empty() {
                return Err(Error::InvalidArgument(
                    "the k-th neighbor bandwidth needs a knn graph".into(),
                ));
            }
            let d = knn
                .iter()
                .enumerate()
                .map(|(i, nb)| d2[(i, *nb.last().expect("k >= 1"))].sqrt())
                .collect();
            let m = median(d);
            1.0 / (2.0 * m * m)
        }
    };
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "graph weight scale must be positive and finite, got {s}"
        )));
    }
    Ok(s)
}

/// Weighted similarity graph over the rows of `x`.
pub fn build_graph(x: &DMatrix<f64>, cfg: &GraphConfig) -> Result<Graph> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a graph needs at least 2 points, got {n}"
        )));
    }
    let d2 = squared_distances(x);
    let knn: Vec<Vec<usize>> = match cfg.adjacency {
        Adjacency::FullRbf => Vec::new(),
        Adjacency::Knn { k } => {
            if k == 0 || k >= n {
                return Err(Error::InvalidArgument(format!(
                    "knn graph needs 0 < k < n, got k = {k} with n = {n}"
                )));
            }
            (0..n).map(|i| neighbors(&d2, i, k)).collect()
        }
    };
    let s = weight_scale(cfg, &d2, &knn)?;
    let w = match cfg.adjacency {
        Adjacency::FullRbf => DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                (-s * d2[(i, j)]).exp()
            }
        }),
        Adjacency::Knn { .. } => {
            let mut directed = DMatrix::zeros(n, n);
            for (i, nb) in knn.iter().enumerate() {
                for &j in nb {
                    directed[(i, j)] = (-s * d2[(i, j)]).exp();
                }
            }
            DMatrix::from_fn(n, n, |i, j| {
                let (a, b) = (directed[(i, j)], directed[(j, i)]);
                if cfg.symmetrize {
                    a.max(b)
                } else {
                    a.min(b)
                }
            })
        }
    };
    Graph::from_weights(w, cfg.normalized_laplacian)
}

fn check_partition(n: usize, labeled: &[usize], unlabeled: &[usize]) -> Result<()> {
    if labeled.is_empty() {
        return Err(Error::InvalidArgument("no labeled vertices".into()));
    }
    let mut seen = vec![false; n];
    for &i in labeled.iter().chain(unlabeled) {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument(format!(
                "vertex index {i} out of range or repeated"
            )));
        }
        seen[i] = true;
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} is neither labeled nor unlabeled"
        )));
    }
    Ok(())
}

/// Every unlabeled vertex must be reachable from some labeled vertex.
fn check_reachable(g: &Graph, labeled: &[usize]) -> Result<()> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = labeled.iter().copied().collect();
    for &i in labeled {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] && g.weights[(i, j)] > 0.0 {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(Error::Connectivity(format!(
            "vertex {v} is in a component without labeled vertices"
        ))),
        None => Ok(()),
    }
}

/// Harmonic solution `f_u = (D_uu - W_uu)^-1 W_ul f_l`, in the order of `unlabeled`.
pub fn harmonic_energy_min(
    g: &Graph,
    labeled: &[usize],
    f_l: &DVector<f64>,
    unlabeled: &[usize],
) -> Result<DVector<f64>> {
    let n = g.len();
    check_partition(n, labeled, unlabeled)?;
    if f_l.len() != labeled.len() {
        return Err(Error::Shape(format!(
            "{} values for {} labeled vertices",
            f_l.len(),
            labeled.len()
        )));
    }
    if unlabeled.is_empty() {
        return Ok(DVector::zeros(0));
    }
    check_reachable(g, labeled)?;
    // the harmonic extension of a constant is that constant; skip the rounding
    if let Some(&c) = f_l.iter().next() {
        if f_l.iter().all(|&v| v == c) {
            return Ok(DVector::from_element(unlabeled.len(), c));
        }
    }
    let w = &g.weights;
    let u = unlabeled.len();
    let l_uu = DMatrix::from_fn(u, u, |a, b| {
        let (i, j) = (unlabeled[a], unlabeled[b]);
        if a == b {
            g.degrees[i] - w[(i, i)]
        } else {
            -w[(i, j)]
        }
    });
    let rhs = DMatrix::from_fn(u, 1, |a, _| {
        labeled
            .iter()
            .zip(f_l.iter())
            .map(|(&j, &f)| w[(unlabeled[a], j)] * f)
            .sum()
    });
    match solve_linear(&l_uu, &rhs) {
        Ok(f) => Ok(f.column(0).into_owned()),
        Err(Error::Singular(_)) => Err(Error::Connectivity(
            "unlabeled block of the Laplacian is singular".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Jacobi iteration `f_u <- D_uu^-1 (W_uu f_u + W_ul f_l)` from zero, until the
/// largest update is below `tol`. Returns the iterate and the sweep count.
pub fn propagate_labels(
    g: &Graph,
    labeled: &[usize],
    f_l: &DVector<f64>,
    unlabeled: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, usize)> {
    check_partition(g.len(), labeled, unlabeled)?;
    let w = &g.weights;
    let mut f = DVector::zeros(g.len());
    for (&i, &v) in labeled.iter().zip(f_l.iter()) {
        f[i] = v;
    }
    for it in 1..=max_iter {
        let mut delta = 0.0f64;
        let next: Vec<f64> = unlabeled
            .iter()
            .map(|&i| w.row(i).transpose().dot(&f) / g.degrees[i])
            .collect();
        for (&i, v) in unlabeled.iter().zip(next) {
            delta = delta.max((v - f[i]).abs());
            f[i] = v;
        }
        if delta < tol {
            let out = DVector::from_iterator(unlabeled.len(), unlabeled.iter().map(|&i| f[i]));
            return Ok((out, it));
        }
    }
    Err(Error::Numerical {
        iteration: max_iter,
        what: "label propagation did not reach the tolerance".into(),
    })
}

/// Transductive classification of the unlabeled rows of `d` by harmonic energy
/// minimization. Returns the unlabeled row indices, their harmonic values and
/// predicted classes (`classes[1]` iff the value exceeds 0.5).
pub fn harmonic_classify(
    d: &Dataset,
    cfg: &GraphConfig,
) -> Result<(Vec<usize>, DVector<f64>, Vec<usize>)> {
    let (split, unlabeled) = split_labeled_unlabeled(d);
    let labeled: Vec<usize> = (0..d.len()).filter(|i| d.labels()[*i].is_some()).collect();
    let g = build_graph(d.features(), cfg)?;
    let f_l = Target::ZeroOne.encode(&split.y_l);
    let f_u = harmonic_energy_min(&g, &labeled, &f_l, &unlabeled)?;
    let pred = f_u.iter().map(|&v| usize::from(v > 0.5)).collect();
    Ok((unlabeled, f_u, pred))
}
