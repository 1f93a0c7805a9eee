use nalgebra::{DMatrix, DVector};

use crate::data::{Target, TrainingData};
use crate::error::Result;
use crate::model::{sigmoid, softplus, Family, Link, TrainedModel, TrainingMeta};
use crate::optim::{minimize, solve_vec, Objective, OptimSettings};

use super::least_squares::{augment, check_lambda, linear_model, ridge_penalty};

/// Mean negative log-likelihood of the labeled data plus `lambda ||w||^2`,
/// over `theta = (w, b)`.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    pub(crate) a: DMatrix<f64>,
    pub(crate) y: DVector<f64>,
    pub(crate) lambda: f64,
}

pub fn logistic_objective(data: &TrainingData, lambda: f64) -> LogisticObjective {
    LogisticObjective {
        a: augment(&data.x_l),
        y: Target::ZeroOne.encode(&data.y_l),
        lambda,
    }
}

impl LogisticObjective {
    pub(crate) fn dim(&self) -> usize {
        self.a.ncols() - 1
    }

    /// Gauss-Newton matrix of the labeled term plus the ridge penalty.
    pub(crate) fn hessian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let n = self.a.nrows() as f64;
        let z = &self.a * theta;
        let w = z.map(|z| {
            let p = sigmoid(z);
            p * (1.0 - p)
        });
        let mut aw = self.a.clone();
        for (i, mut row) in aw.row_iter_mut().enumerate() {
            row *= w[i];
        }
        self.a.transpose() * aw / n + ridge_penalty(self.dim(), 2.0 * self.lambda)
    }
}

impl Objective for LogisticObjective {
    fn eval(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let n = self.a.nrows() as f64;
        let z = &self.a * theta;
        let mut f = 0.0;
        let mut r = DVector::zeros(z.len());
        for i in 0..z.len() {
            f += softplus(z[i]) - self.y[i] * z[i];
            r[i] = sigmoid(z[i]) - self.y[i];
        }
        let d = self.dim();
        let w = theta.rows(0, d);
        let mut g = self.a.transpose() * r / n;
        g.rows_mut(0, d).axpy(2.0 * self.lambda, &w, 1.0);
        (f / n + self.lambda * w.norm_squared(), g)
    }

    fn direction(&self, theta: &DVector<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
        solve_vec(&self.hessian(theta), grad).ok()
    }
}

/// L2-regularized logistic regression; the decision value is the log-odds of `classes[1]`.
pub fn train_logistic(data: &TrainingData, lambda: f64, s: &OptimSettings) -> Result<TrainedModel> {
    data.require_both_classes()?;
    check_lambda(lambda)?;
    let obj = logistic_objective(data, lambda);
    let r = minimize(&obj, DVector::zeros(data.dim() + 1), s)?;
    let mut meta = TrainingMeta {
        converged: r.converged,
        iterations: r.iterations,
        warnings: Vec::new(),
    };
    if !r.converged {
        meta.warnings.push("logistic regression did not converge".into());
    }
    Ok(linear_model(Family::Logistic, &data.classes, &r.x, Link::Logistic, meta))
}
