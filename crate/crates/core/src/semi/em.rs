use nalgebra::DMatrix;

use crate::data::TrainingData;
use crate::error::{Error, Result};
use crate::model::{Covariance, Family, GaussianParams, Params, TrainedModel, TrainingMeta};
use crate::supervised::{train_lda, train_nearest_mean};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerativeFamily {
    NearestMean,
    Lda,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSettings {
    /// Stop when the log-likelihood improves by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Added to the LDA covariance diagonal (ignored for nearest mean).
    pub reg: f64,
}

impl Default for EmSettings {
    fn default() -> Self {
        EmSettings {
            tol: 1e-8,
            max_iter: 1000,
            reg: 0.0,
        }
    }
}

/// Smallest variance / diagonal increment applied when the covariance collapses.
const COVARIANCE_FLOOR: f64 = 1e-9;

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `sum_l log p(x_l, y_l) + sum_u log p(x_u)` under a Gaussian model.
pub fn observed_log_likelihood(p: &GaussianParams, data: &TrainingData) -> Result<f64> {
    let lab: f64 = p
        .log_joint(&data.x_l)?
        .iter()
        .zip(&data.y_l)
        .map(|(l, &c)| l[c])
        .sum();
    let unl: f64 = if data.n_unlabeled() > 0 {
        p.log_joint(&data.x_u)?
            .iter()
            .map(|l| log_sum_exp(l[0], l[1]))
            .sum()
    } else {
        0.0
    };
    Ok(lab + unl)
}

/// Posterior probability of `classes[1]` for each row.
fn posteriors(p: &GaussianParams, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(p.log_joint(x)?
        .iter()
        .map(|l| 1.0 / (1.0 + (l[0] - l[1]).exp()))
        .collect())
}

fn m_step(
    family: GenerativeFamily,
    x: &DMatrix<f64>,
    r1: &[f64],
    reg: f64,
    warnings: &mut Vec<String>,
) -> GaussianParams {
    let (n, d) = (x.nrows(), x.ncols());
    let w1: f64 = r1.iter().sum();
    let w = [n as f64 - w1, w1];
    let mut means = DMatrix::zeros(2, d);
    for i in 0..n {
        for j in 0..d {
            means[(0, j)] += (1.0 - r1[i]) * x[(i, j)];
            means[(1, j)] += r1[i] * x[(i, j)];
        }
    }
    for c in 0..2 {
        means.row_mut(c).scale_mut(1.0 / w[c]);
    }
    let priors = [w[0] / n as f64, w[1] / n as f64];
    let covariance = match family {
        GenerativeFamily::NearestMean => {
            let mut ss = 0.0;
            for i in 0..n {
                ss += (1.0 - r1[i]) * (x.row(i) - means.row(0)).norm_squared()
                    + r1[i] * (x.row(i) - means.row(1)).norm_squared();
            }
            let mut v = ss / (n * d) as f64;
            if !(v >= COVARIANCE_FLOOR) {
                v = COVARIANCE_FLOOR;
                warnings.push("variance collapsed; floored".into());
            }
            Covariance::Spherical(v)
        }
        GenerativeFamily::Lda => {
            let mut cov = DMatrix::zeros(d, d);
            for i in 0..n {
                for (c, wt) in [(0, 1.0 - r1[i]), (1, r1[i])] {
                    let r = (x.row(i) - means.row(c)).transpose();
                    cov += (&r * r.transpose()) * wt;
                }
            }
            cov /= n as f64;
            for j in 0..d {
                cov[(j, j)] += reg;
            }
            if cov.clone().cholesky().is_none() {
                for j in 0..d {
                    cov[(j, j)] += COVARIANCE_FLOOR;
                }
                warnings.push("covariance collapsed; diagonal floor applied".into());
            }
            Covariance::Shared(cov)
        }
    };
    GaussianParams {
        priors,
        means,
        covariance,
    }
}

/// [`train_em`] that also returns the observed-data log-likelihood after
/// initialization and after every EM iteration.
pub fn train_em_traced(
    data: &TrainingData,
    family: GenerativeFamily,
    s: &EmSettings,
) -> Result<(TrainedModel, Vec<f64>)> {
    let init = match family {
        GenerativeFamily::NearestMean => train_nearest_mean(data)?,
        GenerativeFamily::Lda => train_lda(data, s.reg)?,
    };
    let Params::Gaussian(mut params) = init.params else {
        unreachable!("generative trainers return Gaussian parameters")
    };
    let mut warnings = init.meta.warnings;
    let x_all = data.all_features();
    let mut ll = observed_log_likelihood(&params, data)?;
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < s.max_iter {
        iterations += 1;
        let mut r1: Vec<f64> = data.y_l.iter().map(|&c| c as f64).collect();
        if data.n_unlabeled() > 0 {
            r1.extend(posteriors(&params, &data.x_u)?);
        }
        params = m_step(family, &x_all, &r1, s.reg, &mut warnings);
        let next = observed_log_likelihood(&params, data)?;
        if !next.is_finite() {
            return Err(Error::Numerical {
                iteration: iterations,
                what: "log-likelihood is not finite".into(),
            });
        }
        trace.push(next);
        let gain = next - ll;
        ll = next;
        if gain < s.tol {
            converged = true;
            break;
        }
    }
    let q = if data.n_unlabeled() > 0 {
        posteriors(&params, &data.x_u)?
    } else {
        Vec::new()
    };
    warnings.dedup();
    let family = match family {
        GenerativeFamily::NearestMean => Family::EmNearestMean,
        GenerativeFamily::Lda => Family::EmLda,
    };
    let model = TrainedModel::new(
        family,
        data.classes.clone(),
        Params::Gaussian(params),
        TrainingMeta {
            converged,
            iterations,
            warnings,
        },
    )
    .with_responsibilities(q);
    Ok((model, trace))
}

/// Expectation maximization for the nearest mean classifier or LDA, started
/// from the supervised fit. Labeled points keep their labels; unlabeled points
/// contribute through their posterior class probabilities.
pub fn train_em(data: &TrainingData, family: GenerativeFamily, s: &EmSettings) -> Result<TrainedModel> {
    train_em_traced(data, family, s).map(|(m, _)| m)
}
