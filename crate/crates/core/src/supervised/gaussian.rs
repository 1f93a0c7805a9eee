use nalgebra::DMatrix;

use crate::data::TrainingData;
use crate::error::{Error, Result};
use crate::model::{Covariance, Family, GaussianParams, Params, TrainedModel, TrainingMeta};

/// Replacement for a pooled variance of exactly zero.
pub(crate) const NMC_VARIANCE_FLOOR: f64 = 1e-12;

/// Class means as the rows of a 2 x d matrix.
fn class_means(x: &DMatrix<f64>, y: &[usize]) -> DMatrix<f64> {
    let mut sums = DMatrix::zeros(2, x.ncols());
    let mut counts = [0usize; 2];
    for (i, &c) in y.iter().enumerate() {
        counts[c] += 1;
        for j in 0..x.ncols() {
            sums[(c, j)] += x[(i, j)];
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        sums.row_mut(c).scale_mut(1.0 / n as f64);
    }
    sums
}

fn priors(data: &TrainingData) -> [f64; 2] {
    let [n0, n1] = data.class_counts();
    let n = (n0 + n1) as f64;
    [n0 as f64 / n, n1 as f64 / n]
}

/// Nearest mean classifier as a Gaussian model with shared variance `sigma^2 I`,
/// `sigma^2 = sum_c sum_{i in c} ||x_i - mu_c||^2 / (n_l d)`.
pub fn train_nearest_mean(data: &TrainingData) -> Result<TrainedModel> {
    data.require_both_classes()?;
    let means = class_means(&data.x_l, &data.y_l);
    let mut ss = 0.0;
    for (i, &c) in data.y_l.iter().enumerate() {
        ss += (data.x_l.row(i) - means.row(c)).norm_squared();
    }
    let mut variance = ss / (data.n_labeled() * data.dim()) as f64;
    let mut meta = TrainingMeta::closed_form();
    if !(variance > 0.0) {
        variance = NMC_VARIANCE_FLOOR;
        meta.warnings
            .push(format!("zero pooled variance replaced by {NMC_VARIANCE_FLOOR:e}"));
    }
    Ok(TrainedModel::new(
        Family::NearestMean,
        data.classes.clone(),
        Params::Gaussian(GaussianParams {
            priors: priors(data),
            means,
            covariance: Covariance::Spherical(variance),
        }),
        meta,
    ))
}

/// Linear discriminant analysis with the maximum-likelihood pooled covariance
/// (denominator `n_l`) plus `reg * I`.
pub fn train_lda(data: &TrainingData, reg: f64) -> Result<TrainedModel> {
    data.require_both_classes()?;
    if !(reg >= 0.0 && reg.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "covariance regularization must be nonnegative, got {reg}"
        )));
    }
    let d = data.dim();
    let means = class_means(&data.x_l, &data.y_l);
    let mut cov = DMatrix::zeros(d, d);
    for (i, &c) in data.y_l.iter().enumerate() {
        let r = (data.x_l.row(i) - means.row(c)).transpose();
        cov += &r * r.transpose();
    }
    cov /= data.n_labeled() as f64;
    for j in 0..d {
        cov[(j, j)] += reg;
    }
    if cov.clone().cholesky().is_none() {
        return Err(Error::Singular(
            "pooled covariance is not positive definite; use a positive covariance regularization".into(),
        ));
    }
    Ok(TrainedModel::new(
        Family::Lda,
        data.classes.clone(),
        Params::Gaussian(GaussianParams {
            priors: priors(data),
            means,
            covariance: Covariance::Shared(cov),
        }),
        TrainingMeta::closed_form(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassOrder;
    use approx::assert_abs_diff_eq;

    fn ab() -> ClassOrder {
        ClassOrder::new("A", "B").unwrap()
    }

    #[test]
    fn nearest_mean_single_points() {
        let data = TrainingData::supervised(
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 2.0, 2.0]),
            vec![0, 1],
            ab(),
        )
        .unwrap();
        let m = train_nearest_mean(&data).unwrap();
        let Params::Gaussian(p) = &m.params else { panic!() };
        assert_eq!(p.means.as_slice(), &[0.0, 2.0, 0.0, 2.0]);
        assert_eq!(m.meta.warnings.len(), 1);
        let x = DMatrix::from_row_slice(1, 2, &[0.1, 0.0]);
        assert_eq!(m.predict(&x).unwrap(), vec![0]);
    }

    #[test]
    fn lda_priors_are_frequencies() {
        let n = 40;
        let x = DMatrix::from_fn(n, 1, |i, _| (i as f64 * 0.37).sin() + if i < 30 { 0.0 } else { 3.0 });
        let y: Vec<usize> = (0..n).map(|i| usize::from(i >= 30)).collect();
        let m = train_lda(&TrainingData::supervised(x, y, ab()).unwrap(), 0.0).unwrap();
        let Params::Gaussian(p) = &m.params else { panic!() };
        assert_abs_diff_eq!(p.priors[0], 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.priors[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn lda_singular_without_reg() {
        let x = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 1.0, 2.0, 2.0]);
        let data = TrainingData::supervised(x, vec![0, 0, 1], ab()).unwrap();
        assert!(matches!(train_lda(&data, 0.0), Err(Error::Singular(_))));
        assert!(train_lda(&data, 0.1).is_ok());
    }

    #[test]
    fn missing_class() {
        let data = TrainingData::supervised(DMatrix::zeros(2, 1), vec![1, 1], ab()).unwrap();
        assert_eq!(
            train_nearest_mean(&data).unwrap_err(),
            Error::MissingClass("A".into())
        );
    }
}
