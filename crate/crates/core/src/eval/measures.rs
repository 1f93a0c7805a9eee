use nalgebra::DMatrix;

use super::missing::true_labels;
use crate::data::{vstack, Dataset, TrainingData};
use crate::error::{Error, Result};
use crate::model::TrainedModel;

/// Misclassification rate.
pub fn measure_error(m: &TrainedModel, x: &DMatrix<f64>, y: &[usize]) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    if y.len() != x.nrows() {
        return Err(Error::Shape(format!("{} labels for {} rows", y.len(), x.nrows())));
    }
    let wrong = m.predict(x)?.iter().zip(y).filter(|(p, t)| p != t).count();
    Ok(wrong as f64 / y.len() as f64)
}

/// Mean surrogate loss on a test set.
pub fn measure_loss_test(m: &TrainedModel, x: &DMatrix<f64>, y: &[usize]) -> Result<f64> {
    m.mean_loss(x, y)
}

/// Mean surrogate loss over every training row, using the original labels of
/// the rows that are unlabeled in `d_missing`.
pub fn measure_loss_all(m: &TrainedModel, d_missing: &Dataset, d_original: &Dataset) -> Result<f64> {
    true_labels(d_missing, d_original)?;
    m.mean_loss(d_original.features(), &d_original.complete_labels()?)
}

/// Everything a measure may look at for one trained model.
#[derive(Debug, Clone)]
pub struct Trial {
    pub train: TrainingData,
    /// True classes of `train.x_u`.
    pub y_u: Vec<usize>,
    pub x_test: DMatrix<f64>,
    pub y_test: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Test-set misclassification rate.
    Error,
    /// Mean test-set surrogate loss.
    LossTest,
    /// Mean surrogate loss over labeled and unlabeled training rows.
    LossAll,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Error, Measure::LossTest, Measure::LossAll];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Error => "error",
            Measure::LossTest => "loss-test",
            Measure::LossAll => "loss-all",
        }
    }

    pub fn from_name(name: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn evaluate(self, m: &TrainedModel, t: &Trial) -> Result<f64> {
        let v = match self {
            Measure::Error => measure_error(m, &t.x_test, &t.y_test)?,
            Measure::LossTest => measure_loss_test(m, &t.x_test, &t.y_test)?,
            Measure::LossAll => {
                let x = vstack(&t.train.x_l, &t.train.x_u)?;
                let mut y = t.train.y_l.clone();
                y.extend_from_slice(&t.y_u);
                m.mean_loss(&x, &y)?
            }
        };
        if !v.is_finite() {
            return Err(Error::Numerical {
                iteration: 0,
                what: format!("{} evaluated to {v}", self.name()),
            });
        }
        Ok(v)
    }
}
