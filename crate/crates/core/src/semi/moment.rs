use crate::data::TrainingData;
use crate::error::Result;
use crate::model::{Covariance, Family, Params, TrainedModel};
use crate::supervised::{train_nearest_mean, NMC_VARIANCE_FLOOR};

/// Nearest mean classifier whose class means are shifted so that
/// `sum_c pi_c mu_c` equals the mean of all (labeled and unlabeled) points;
/// `pi_c` are the labeled class frequencies. The variance is re-estimated on
/// the labeled data around the shifted means.
pub fn train_moment_constrained_nmc(data: &TrainingData) -> Result<TrainedModel> {
    let mut model = train_nearest_mean(data)?;
    let x_all = data.all_features();
    let mu_all = x_all.row_mean();
    let Params::Gaussian(p) = &mut model.params else {
        unreachable!("nearest mean returns Gaussian parameters")
    };
    let implied = p.means.row(0) * p.priors[0] + p.means.row(1) * p.priors[1];
    let shift = mu_all - implied;
    for c in 0..2 {
        let shifted = p.means.row(c) + &shift;
        p.means.set_row(c, &shifted);
    }
    let mut ss = 0.0;
    for (i, &c) in data.y_l.iter().enumerate() {
        ss += (data.x_l.row(i) - p.means.row(c)).norm_squared();
    }
    let v = ss / (data.n_labeled() * data.dim()) as f64;
    p.covariance = Covariance::Spherical(if v > 0.0 { v } else { NMC_VARIANCE_FLOOR });
    model.family = Family::MomentConstrainedNearestMean;
    Ok(model)
}
