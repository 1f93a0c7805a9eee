//! Datasets with partially missing labels and the binary class encoding.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Target scale used when a label is turned into a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `classes[0] -> 0.0`, `classes[1] -> 1.0`; regression-style models threshold at 0.5.
    ZeroOne,
    /// `classes[0] -> -1.0`, `classes[1] -> +1.0`; margin-style models threshold at 0.
    PlusMinusOne,
}

impl Target {
    pub fn value(self, class: usize) -> f64 {
        match (self, class) {
            (Target::ZeroOne, 0) => 0.0,
            (Target::ZeroOne, _) => 1.0,
            (Target::PlusMinusOne, 0) => -1.0,
            (Target::PlusMinusOne, _) => 1.0,
        }
    }

    pub fn encode(self, classes: &[usize]) -> DVector<f64> {
        DVector::from_iterator(classes.len(), classes.iter().map(|&c| self.value(c)))
    }
}

/// The two class names, in encoding order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassOrder([String; 2]);

impl ClassOrder {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Result<Self> {
        let (first, second) = (first.into(), second.into());
        if first == second {
            return Err(Error::InvalidArgument(format!(
                "class names must be distinct, got '{first}' twice"
            )));
        }
        Ok(ClassOrder([first, second]))
    }

    /// Class order by first appearance. Fails unless exactly two distinct names occur.
    pub fn first_seen<'a, I>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut seen: Vec<&str> = Vec::with_capacity(2);
        for name in names {
            if !seen.contains(&name) {
                if seen.len() == 2 {
                    return Err(Error::InvalidArgument(format!(
                        "binary classification only; found a third class '{name}'"
                    )));
                }
                seen.push(name);
            }
        }
        match seen.as_slice() {
            [a, b] => ClassOrder::new(*a, *b),
            _ => Err(Error::InvalidArgument(
                "need labels from two distinct classes to infer the class order".into(),
            )),
        }
    }

    pub fn names(&self) -> &[String; 2] {
        &self.0
    }

    pub fn name(&self, class: usize) -> &str {
        &self.0[class]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    /// Map class names onto the numeric target scale.
    pub fn encode<S: AsRef<str>>(&self, labels: &[S], target: Target) -> Result<Vec<f64>> {
        labels
            .iter()
            .map(|l| self.index_of(l.as_ref()).map(|c| target.value(c)))
            .collect()
    }

    /// Inverse of [`ClassOrder::encode`]; values are matched against the target's two levels.
    pub fn decode(&self, values: &[f64], target: Target) -> Result<Vec<String>> {
        values
            .iter()
            .map(|&v| {
                if v == target.value(0) {
                    Ok(self.0[0].clone())
                } else if v == target.value(1) {
                    Ok(self.0[1].clone())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "{v} is not an encoded class value"
                    )))
                }
            })
            .collect()
    }
}

/// Feature matrix with one optional label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DMatrix<f64>,
    labels: Vec<Option<usize>>,
    classes: ClassOrder,
}

impl Dataset {
    pub fn new(
        features: DMatrix<f64>,
        labels: Vec<Option<usize>>,
        classes: ClassOrder,
    ) -> Result<Self> {
        if labels.len() != features.nrows() {
            return Err(Error::Shape(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.nrows()
            )));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&c| c > 1) {
            return Err(Error::InvalidArgument(format!("class index {bad} out of range")));
        }
        if let Some((i, _)) = features.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (r, c) = (i % features.nrows(), i / features.nrows());
            return Err(Error::InvalidArgument(format!(
                "non-finite feature value at row {r}, column {c}"
            )));
        }
        Ok(Dataset {
            features,
            labels,
            classes,
        })
    }

    /// Build from class names; missing labels are `None`. Without an explicit
    /// order, classes are ordered by first appearance.
    pub fn from_names<S: AsRef<str>>(
        features: DMatrix<f64>,
        labels: &[Option<S>],
        classes: Option<ClassOrder>,
    ) -> Result<Self> {
        let classes = match classes {
            Some(c) => c,
            None => ClassOrder::first_seen(labels.iter().flatten().map(|s| s.as_ref()))?,
        };
        let idx = labels
            .iter()
            .map(|l| l.as_ref().map(|s| classes.index_of(s.as_ref())).transpose())
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(features, idx, classes)
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn classes(&self) -> &ClassOrder {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    /// All labels, failing at the first missing one.
    pub fn complete_labels(&self) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| l.ok_or(Error::MissingLabel(i)))
            .collect()
    }

    pub fn with_labels(&self, labels: Vec<Option<usize>>) -> Result<Self> {
        Dataset::new(self.features.clone(), labels, self.classes.clone())
    }

    pub fn select(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: select_rows(&self.features, rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Same rows with every label removed.
    pub fn unlabeled(&self) -> Dataset {
        Dataset {
            features: self.features.clone(),
            labels: vec![None; self.len()],
            classes: self.classes.clone(),
        }
    }

    /// Row-wise concatenation; class orders must agree.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.classes != other.classes {
            return Err(Error::InvalidArgument("class orders differ".into()));
        }
        let features = vstack(&self.features, &other.features)?;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Dataset::new(features, labels, self.classes.clone())
    }
}

/// Labeled and unlabeled parts of a dataset as consumed by the trainers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    pub x_l: DMatrix<f64>,
    pub y_l: Vec<usize>,
    pub x_u: DMatrix<f64>,
    pub classes: ClassOrder,
}

impl TrainingData {
    pub fn new(
        x_l: DMatrix<f64>,
        y_l: Vec<usize>,
        x_u: DMatrix<f64>,
        classes: ClassOrder,
    ) -> Result<Self> {
        if x_l.nrows() != y_l.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} labeled rows",
                y_l.len(),
                x_l.nrows()
            )));
        }
        if x_u.nrows() > 0 && x_l.nrows() > 0 && x_u.ncols() != x_l.ncols() {
            return Err(Error::Shape(format!(
                "labeled data has {} columns, unlabeled data {}",
                x_l.ncols(),
                x_u.ncols()
            )));
        }
        Ok(TrainingData {
            x_l,
            y_l,
            x_u,
            classes,
        })
    }

    /// Fully supervised data (no unlabeled rows).
    pub fn supervised(x_l: DMatrix<f64>, y_l: Vec<usize>, classes: ClassOrder) -> Result<Self> {
        let d = x_l.ncols();
        TrainingData::new(x_l, y_l, DMatrix::zeros(0, d), classes)
    }

    pub fn dim(&self) -> usize {
        self.x_l.ncols()
    }

    pub fn n_labeled(&self) -> usize {
        self.x_l.nrows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.x_u.nrows()
    }

    pub fn without_unlabeled(&self) -> TrainingData {
        TrainingData {
            x_l: self.x_l.clone(),
            y_l: self.y_l.clone(),
            x_u: DMatrix::zeros(0, self.x_l.ncols()),
            classes: self.classes.clone(),
        }
    }

    /// Labeled rows followed by unlabeled rows.
    pub fn all_features(&self) -> DMatrix<f64> {
        vstack(&self.x_l, &self.x_u).expect("column counts checked at construction")
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.y_l.iter().filter(|&&c| c == 1).count();
        [self.y_l.len() - ones, ones]
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        let counts = self.class_counts();
        for (c, &n) in counts.iter().enumerate() {
            if n == 0 {
                return Err(Error::MissingClass(self.classes.name(c).to_string()));
            }
        }
        Ok(())
    }

    pub(crate) fn require_labeled(&self) -> Result<()> {
        if self.n_labeled() == 0 {
            return Err(Error::InvalidArgument("no labeled examples".into()));
        }
        Ok(())
    }
}

/// Partition rows by label presence, keeping the original order within each part.
/// The second element maps unlabeled rows back to their index in `d`.
pub fn split_labeled_unlabeled(d: &Dataset) -> (TrainingData, Vec<usize>) {
    let mut lab = Vec::new();
    let mut unl = Vec::new();
    let mut y_l = Vec::new();
    for (i, l) in d.labels.iter().enumerate() {
        match l {
            Some(c) => {
                lab.push(i);
                y_l.push(*c);
            }
            None => unl.push(i),
        }
    }
    let data = TrainingData {
        x_l: select_rows(&d.features, &lab),
        y_l,
        x_u: select_rows(&d.features, &unl),
        classes: d.classes.clone(),
    };
    (data, unl)
}

pub(crate) fn select_rows(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

pub(crate) fn vstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() == 0 {
        return Ok(b.clone());
    }
    if b.nrows() == 0 {
        return Ok(a.clone());
    }
    if a.ncols() != b.ncols() {
        return Err(Error::Shape(format!(
            "cannot stack {} columns on {} columns",
            b.ncols(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    Ok(DMatrix::from_fn(n + b.nrows(), a.ncols(), |i, j| {
        if i < n {
            a[(i, j)]
        } else {
            b[(i - n, j)]
        }
    }))
}
