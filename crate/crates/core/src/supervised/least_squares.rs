use nalgebra::{DMatrix, DVector};

use crate::data::{ClassOrder, Target, TrainingData};
use crate::error::{Error, Result};
use crate::model::{Family, LinearParams, Link, Params, TrainedModel, TrainingMeta};
use crate::optim::solve_vec;

/// Design matrix with a trailing column of ones.
pub(crate) fn augment(x: &DMatrix<f64>) -> DMatrix<f64> {
    x.clone().insert_column(x.ncols(), 1.0)
}

/// `scale * I` on the weights, zero on the trailing intercept slot.
pub(crate) fn ridge_penalty(d: usize, scale: f64) -> DMatrix<f64> {
    let mut p = DMatrix::identity(d + 1, d + 1) * scale;
    p[(d, d)] = 0.0;
    p
}

/// Wrap an augmented coefficient vector `(w, b)` as a 0/1 least-squares model.
pub(crate) fn linear_model(
    family: Family,
    classes: &ClassOrder,
    theta: &DVector<f64>,
    link: Link,
    meta: TrainingMeta,
) -> TrainedModel {
    let d = theta.len() - 1;
    TrainedModel::new(
        family,
        classes.clone(),
        Params::Linear(LinearParams {
            weights: theta.rows(0, d).into_owned(),
            intercept: theta[d],
            link,
        }),
        meta,
    )
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be a nonnegative finite number, got {lambda}"
        )));
    }
    Ok(())
}

/// Ridge-regularized least squares on 0/1 targets with an unpenalized intercept:
/// minimizes `||X w + b - y||^2 / n_l + lambda ||w||^2`.
pub fn train_least_squares(data: &TrainingData, lambda: f64) -> Result<TrainedModel> {
    data.require_labeled()?;
    check_lambda(lambda)?;
    let a = augment(&data.x_l);
    let y = Target::ZeroOne.encode(&data.y_l);
    let n = data.n_labeled() as f64;
    let g = a.transpose() * &a + ridge_penalty(data.dim(), lambda * n);
    let theta = solve_vec(&g, &(a.transpose() * y))?;
    Ok(linear_model(
        Family::LeastSquares,
        &data.classes,
        &theta,
        Link::Identity,
        TrainingMeta::closed_form(),
    ))
}
