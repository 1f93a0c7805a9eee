use crate::data::{Target, TrainingData};
use crate::error::Result;
use crate::model::{Family, Link, TrainingMeta, TrainedModel};
use crate::optim::solve_vec;
use crate::supervised::{augment, check_lambda, linear_model, ridge_penalty};

/// Least squares classifier with the labeled second-moment matrix replaced by
/// the all-data estimate:
/// `theta = ((n_l / n_all) A_all' A_all + lambda n_l I*)^-1 A_l' y`,
/// where `A` appends a column of ones and `I*` skips the intercept.
pub fn train_usm_least_squares(data: &TrainingData, lambda: f64) -> Result<TrainedModel> {
    data.require_labeled()?;
    check_lambda(lambda)?;
    let a_all = augment(&data.all_features());
    let a_l = augment(&data.x_l);
    let (nl, n_all) = (data.n_labeled() as f64, a_all.nrows() as f64);
    let g = a_all.transpose() * &a_all * (nl / n_all) + ridge_penalty(data.dim(), lambda * nl);
    let y = Target::ZeroOne.encode(&data.y_l);
    let theta = solve_vec(&g, &(a_l.transpose() * y))?;
    Ok(linear_model(
        Family::UpdatedSecondMoment,
        &data.classes,
        &theta,
        Link::Identity,
        TrainingMeta::closed_form(),
    ))
}
