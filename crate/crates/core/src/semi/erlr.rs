use nalgebra::{DMatrix, DVector};

use crate::data::TrainingData;
use crate::error::{Error, Result};
use crate::model::{sigmoid, softplus, Family, Link, Params, TrainedModel, TrainingMeta};
use crate::optim::{minimize, solve_vec, Objective, OptimSettings};
use crate::supervised::{augment, linear_model, logistic_objective, train_logistic, LogisticObjective};

/// Binary entropy in nats, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Logistic objective plus `lambda_entropy` times the mean entropy of the
/// predicted class probabilities on the unlabeled data.
#[derive(Debug, Clone)]
pub struct ErlrObjective {
    logistic: LogisticObjective,
    a_u: DMatrix<f64>,
    lambda_entropy: f64,
}

pub fn erlr_objective(data: &TrainingData, lambda_entropy: f64, lambda_ridge: f64) -> ErlrObjective {
    ErlrObjective {
        logistic: logistic_objective(data, lambda_ridge),
        a_u: augment(&data.x_u),
        lambda_entropy,
    }
}

impl Objective for ErlrObjective {
    fn eval(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let (mut f, mut g) = self.logistic.eval(theta);
        let nu = self.a_u.nrows();
        if nu > 0 && self.lambda_entropy > 0.0 {
            let scale = self.lambda_entropy / nu as f64;
            let z = &self.a_u * theta;
            let mut dz = DVector::zeros(nu);
            for i in 0..nu {
                let p = sigmoid(z[i]);
                // entropy in terms of the log-odds, stable for large |z|
                f += scale * (p * softplus(-z[i]) + (1.0 - p) * softplus(z[i]));
                dz[i] = -scale * z[i] * p * (1.0 - p);
            }
            g += self.a_u.transpose() * dz;
        }
        (f, g)
    }

    /// Preconditioned by the (convex) labeled-data Hessian.
    fn direction(&self, theta: &DVector<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
        solve_vec(&self.logistic.hessian(theta), grad).ok()
    }
}

/// Entropy regularized logistic regression, started from the supervised
/// logistic solution.
pub fn train_erlr(
    data: &TrainingData,
    lambda_entropy: f64,
    lambda_ridge: f64,
    s: &OptimSettings,
) -> Result<TrainedModel> {
    if !(lambda_entropy >= 0.0 && lambda_entropy.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "entropy weight must be nonnegative, got {lambda_entropy}"
        )));
    }
    let start = train_logistic(data, lambda_ridge, s)?;
    let Params::Linear(p) = &start.params else {
        unreachable!("logistic regression returns linear parameters")
    };
    let theta0 = p.weights.clone().insert_row(p.weights.len(), p.intercept);
    let obj = erlr_objective(data, lambda_entropy, lambda_ridge);
    let r = minimize(&obj, theta0, s)?;
    let mut meta = TrainingMeta {
        converged: r.converged,
        iterations: start.meta.iterations + r.iterations,
        warnings: Vec::new(),
    };
    if !r.converged {
        meta.warnings
            .push("entropy regularized logistic regression did not converge".into());
    }
    let q = if data.n_unlabeled() > 0 {
        (augment(&data.x_u) * &r.x).iter().map(|&z| sigmoid(z)).collect()
    } else {
        Vec::new()
    };
    Ok(
        linear_model(Family::EntropyRegularizedLogistic, &data.classes, &r.x, Link::Logistic, meta)
            .with_responsibilities(q),
    )
}
