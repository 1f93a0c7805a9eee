//! Trained classifiers and the operations every family supports.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::data::{ClassOrder, Dataset, Target};
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, Kernel};

/// Classifier family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    LeastSquares,
    KernelLeastSquares,
    NearestMean,
    Lda,
    Logistic,
    Svm,
    SelfLearning,
    EmNearestMean,
    EmLda,
    MomentConstrainedNearestMean,
    UpdatedSecondMoment,
    Icls,
    IclsProjection,
    EntropyRegularizedLogistic,
    LaplacianRls,
    LaplacianSvm,
}

impl Family {
    pub const ALL: [Family; 16] = [
        Family::LeastSquares,
        Family::KernelLeastSquares,
        Family::NearestMean,
        Family::Lda,
        Family::Logistic,
        Family::Svm,
        Family::SelfLearning,
        Family::EmNearestMean,
        Family::EmLda,
        Family::MomentConstrainedNearestMean,
        Family::UpdatedSecondMoment,
        Family::Icls,
        Family::IclsProjection,
        Family::EntropyRegularizedLogistic,
        Family::LaplacianRls,
        Family::LaplacianSvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LeastSquares => "ls",
            Family::KernelLeastSquares => "kls",
            Family::NearestMean => "nm",
            Family::Lda => "lda",
            Family::Logistic => "logistic",
            Family::Svm => "svm",
            Family::SelfLearning => "self-learning",
            Family::EmNearestMean => "em-nm",
            Family::EmLda => "em-lda",
            Family::MomentConstrainedNearestMean => "mc-nm",
            Family::UpdatedSecondMoment => "usm",
            Family::Icls => "icls",
            Family::IclsProjection => "icls-projection",
            Family::EntropyRegularizedLogistic => "erlr",
            Family::LaplacianRls => "laprls",
            Family::LaplacianSvm => "lapsvm",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Raw output regressed on 0/1 targets; decision value is `raw - 0.5`.
    Identity,
    /// Output is the log-odds of `classes[1]`.
    Logistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub weights: DVector<f64>,
    pub intercept: f64,
    pub link: Link,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelLoss {
    Squared,
    SquaredHinge,
}

/// `f(x) = sum_i alpha_i k(s_i, x) + bias` over the support points `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub alpha: DVector<f64>,
    pub bias: f64,
    pub support: DMatrix<f64>,
    pub kernel: Kernel,
    pub target: Target,
    pub loss: KernelLoss,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    /// Full covariance shared by both classes (LDA).
    Shared(DMatrix<f64>),
    /// `variance * I` shared by both classes (nearest mean).
    Spherical(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    pub priors: [f64; 2],
    /// One row per class.
    pub means: DMatrix<f64>,
    pub covariance: Covariance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Linear(LinearParams),
    Kernel(KernelParams),
    Gaussian(GaussianParams),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingMeta {
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl TrainingMeta {
    pub fn closed_form() -> Self {
        TrainingMeta {
            converged: true,
            iterations: 0,
            warnings: Vec::new(),
        }
    }
}

/// Line `x2 = intercept + slope * x1`, or the vertical line `x1 = x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Line { intercept: f64, slope: f64 },
    Vertical { x1: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub family: Family,
    pub classes: ClassOrder,
    pub params: Params,
    /// Probability of `classes[1]` per unlabeled training point, when assigned.
    pub responsibilities: Option<Vec<f64>>,
    pub meta: TrainingMeta,
}

pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl GaussianParams {
    pub fn dim(&self) -> usize {
        self.means.ncols()
    }

    /// Precision matrix and log-determinant of the shared covariance.
    fn precision(&self) -> Result<(DMatrix<f64>, f64)> {
        let d = self.dim();
        match &self.covariance {
            Covariance::Spherical(v) => Ok((
                DMatrix::identity(d, d) / *v,
                d as f64 * v.ln(),
            )),
            Covariance::Shared(s) => {
                let chol = s.clone().cholesky().ok_or_else(|| {
                    Error::Singular("covariance is not positive definite".into())
                })?;
                let logdet = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
                Ok((chol.inverse(), logdet))
            }
        }
    }

    /// `log(pi_c) + log N(x; mu_c, Sigma)` for both classes, one row per point.
    pub fn log_joint(&self, x: &DMatrix<f64>) -> Result<Vec<[f64; 2]>> {
        let d = self.dim();
        if x.ncols() != d {
            return Err(Error::Shape(format!(
                "model expects {d} features, got {}",
                x.ncols()
            )));
        }
        let (prec, logdet) = self.precision()?;
        let norm = -0.5 * (logdet + d as f64 * (2.0 * PI).ln());
        let lp = [self.priors[0].ln(), self.priors[1].ln()];
        Ok(x
            .row_iter()
            .map(|row| {
                let mut out = [0.0; 2];
                for c in 0..2 {
                    let diff = (row - self.means.row(c)).transpose();
                    let maha = (diff.transpose() * &prec * &diff)[(0, 0)];
                    out[c] = lp[c] + norm - 0.5 * maha;
                }
                out
            })
            .collect())
    }

    /// Linear form `(a0, a)` with log-posterior ratio `a0 + a . x`.
    fn linear_form(&self) -> Result<(f64, DVector<f64>)> {
        let (prec, _) = self.precision()?;
        let m0 = self.means.row(0).transpose();
        let m1 = self.means.row(1).transpose();
        let w = &prec * (&m1 - &m0);
        let a0 = -0.5 * ((m1.transpose() * &prec * &m1)[(0, 0)] - (m0.transpose() * &prec * &m0)[(0, 0)])
            + (self.priors[1] / self.priors[0]).ln();
        Ok((a0, w))
    }
}

impl KernelParams {
    pub fn outputs(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        let k = gram_matrix(&self.kernel, x, &self.support)?;
        Ok(k * &self.alpha + DVector::from_element(x.nrows(), self.bias))
    }
}

impl TrainedModel {
    pub fn new(family: Family, classes: ClassOrder, params: Params, meta: TrainingMeta) -> Self {
        TrainedModel {
            family,
            classes,
            params,
            responsibilities: None,
            meta,
        }
    }

    pub fn with_responsibilities(mut self, q: Vec<f64>) -> Self {
        self.responsibilities = Some(q);
        self
    }

    /// Number of input features the model expects.
    pub fn dim(&self) -> usize {
        match &self.params {
            Params::Linear(p) => p.weights.len(),
            Params::Kernel(p) => p.support.ncols(),
            Params::Gaussian(p) => p.dim(),
        }
    }

    fn check_dim(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.ncols() != self.dim() {
            return Err(Error::Shape(format!(
                "model expects {} features, got {}",
                self.dim(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// Model output before thresholding: the regression output for
    /// least-squares models, log-odds for logistic, `f(x)` for kernel models,
    /// and the log-posterior ratio for generative models.
    pub fn raw_outputs(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        match &self.params {
            Params::Linear(p) => Ok(x * &p.weights + DVector::from_element(x.nrows(), p.intercept)),
            Params::Kernel(p) => p.outputs(x),
            Params::Gaussian(p) => {
                let lj = p.log_joint(x)?;
                Ok(DVector::from_iterator(lj.len(), lj.iter().map(|l| l[1] - l[0])))
            }
        }
    }

    /// Positive exactly where the model predicts `classes[1]`.
    pub fn decision_values(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        let raw = self.raw_outputs(x)?;
        let shift = match &self.params {
            Params::Linear(LinearParams {
                link: Link::Identity,
                ..
            }) => 0.5,
            Params::Kernel(KernelParams {
                target: Target::ZeroOne,
                ..
            }) => 0.5,
            _ => 0.0,
        };
        Ok(raw.add_scalar(-shift))
    }

    /// Class indices; a decision value of exactly zero goes to `classes[0]`.
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<usize>> {
        Ok(self
            .decision_values(x)?
            .iter()
            .map(|&v| usize::from(v > 0.0))
            .collect())
    }

    pub fn predict_names(&self, x: &DMatrix<f64>) -> Result<Vec<String>> {
        Ok(self
            .predict(x)?
            .into_iter()
            .map(|c| self.classes.name(c).to_string())
            .collect())
    }

    /// Per-example surrogate loss.
    pub fn loss(&self, x: &DMatrix<f64>, y: &[usize]) -> Result<Vec<f64>> {
        if y.len() != x.nrows() {
            return Err(Error::Shape(format!(
                "{} labels for {} rows",
                y.len(),
                x.nrows()
            )));
        }
        self.check_dim(x)?;
        match &self.params {
            Params::Linear(p) => {
                let raw = self.raw_outputs(x)?;
                Ok(raw
                    .iter()
                    .zip(y)
                    .map(|(&r, &c)| match p.link {
                        Link::Identity => (r - Target::ZeroOne.value(c)).powi(2),
                        Link::Logistic => softplus(r) - Target::ZeroOne.value(c) * r,
                    })
                    .collect())
            }
            Params::Kernel(p) => {
                let f = p.outputs(x)?;
                Ok(f.iter()
                    .zip(y)
                    .map(|(&f, &c)| match p.loss {
                        KernelLoss::Squared => (f - p.target.value(c)).powi(2),
                        KernelLoss::SquaredHinge => {
                            (1.0 - Target::PlusMinusOne.value(c) * f).max(0.0).powi(2)
                        }
                    })
                    .collect())
            }
            Params::Gaussian(p) => Ok(p
                .log_joint(x)?
                .iter()
                .zip(y)
                .map(|(l, &c)| -l[c])
                .collect()),
        }
    }

    /// Loss over a dataset; every label must be present.
    pub fn loss_on(&self, d: &Dataset) -> Result<Vec<f64>> {
        let y = d.complete_labels()?;
        self.loss(d.features(), &y)
    }

    pub fn mean_loss(&self, x: &DMatrix<f64>, y: &[usize]) -> Result<f64> {
        let l = self.loss(x, y)?;
        if l.is_empty() {
            return Err(Error::InvalidArgument("empty evaluation set".into()));
        }
        Ok(l.iter().sum::<f64>() / l.len() as f64)
    }

    /// Decision boundary of a model that is linear in two input features.
    pub fn line_coefficients(&self) -> Result<Boundary> {
        let (a0, w) = match &self.params {
            Params::Linear(p) => {
                let shift = if p.link == Link::Identity { 0.5 } else { 0.0 };
                (p.intercept - shift, p.weights.clone())
            }
            Params::Kernel(p) => match p.kernel {
                Kernel::Linear => {
                    let shift = if p.target == Target::ZeroOne { 0.5 } else { 0.0 };
                    (p.bias - shift, p.support.transpose() * &p.alpha)
                }
                Kernel::Rbf { .. } => {
                    return Err(Error::Unsupported(format!(
                        "{} with an rbf kernel (non-linear boundary)",
                        self.family.name()
                    )))
                }
            },
            Params::Gaussian(p) => p.linear_form()?,
        };
        if w.len() != 2 {
            return Err(Error::Shape(format!(
                "line coefficients need 2 features, model has {}",
                w.len()
            )));
        }
        let (a1, a2) = (w[0], w[1]);
        if a1 == 0.0 && a2 == 0.0 {
            return Err(Error::DegenerateBoundary);
        }
        if a2.abs() <= 1e-14 * a1.abs() {
            return Ok(Boundary::Vertical { x1: -a0 / a1 });
        }
        Ok(Boundary::Line {
            intercept: -a0 / a2,
            slope: -a1 / a2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ab() -> ClassOrder {
        ClassOrder::new("A", "B").unwrap()
    }

    fn linear(w: &[f64], b: f64) -> TrainedModel {
        TrainedModel::new(
            Family::LeastSquares,
            ab(),
            Params::Linear(LinearParams {
                weights: DVector::from_column_slice(w),
                intercept: b,
                link: Link::Identity,
            }),
            TrainingMeta::closed_form(),
        )
    }

    #[test]
    fn threshold_and_tie_rule() {
        let m = linear(&[1.0], 0.0);
        let x = DMatrix::from_column_slice(2, 1, &[0.6, 0.5]);
        assert_eq!(m.predict(&x).unwrap(), vec![1, 0]);
        assert_eq!(m.decision_values(&x).unwrap()[1], 0.0);
    }

    #[test]
    fn nearest_mean_prediction() {
        let m = TrainedModel::new(
            Family::NearestMean,
            ab(),
            Params::Gaussian(GaussianParams {
                priors: [0.5, 0.5],
                means: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 10.0, 10.0]),
                covariance: Covariance::Spherical(1.0),
            }),
            TrainingMeta::closed_form(),
        );
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 5.0, 5.0]);
        assert_eq!(m.predict(&x).unwrap()[0], 0);
        assert_abs_diff_eq!(m.decision_values(&x).unwrap()[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_svm_decision() {
        let m = TrainedModel::new(
            Family::Svm,
            ab(),
            Params::Kernel(KernelParams {
                alpha: DVector::zeros(2),
                bias: 0.7,
                support: DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
                kernel: Kernel::Rbf { sigma: 1.0 },
                target: Target::PlusMinusOne,
                loss: KernelLoss::SquaredHinge,
            }),
            TrainingMeta::closed_form(),
        );
        let x = DMatrix::from_column_slice(3, 1, &[-3.0, 0.2, 9.0]);
        for v in m.decision_values(&x).unwrap().iter() {
            assert_abs_diff_eq!(*v, 0.7, epsilon = 1e-15);
        }
        let hinge_x = DMatrix::from_column_slice(1, 1, &[5.0]);
        let mut m2 = m.clone();
        if let Params::Kernel(p) = &mut m2.params {
            p.bias = 2.0;
        }
        assert_eq!(m2.loss(&hinge_x, &[1]).unwrap(), vec![0.0]);
    }

    #[test]
    fn squared_loss_values() {
        let m = linear(&[1.0], 0.0);
        let x = DMatrix::from_column_slice(2, 1, &[1.0, 0.8]);
        let l = m.loss(&x, &[1, 0]).unwrap();
        assert_eq!(l[0], 0.0);
        assert_abs_diff_eq!(l[1], 0.64, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let m = linear(&[1.0, 2.0], 0.0);
        assert!(matches!(
            m.predict(&DMatrix::zeros(1, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn line_coefficients_cases() {
        assert_eq!(
            linear(&[0.0, 1.0], 0.0).line_coefficients().unwrap(),
            Boundary::Line {
                intercept: 0.5,
                slope: 0.0
            }
        );
        assert_eq!(
            linear(&[1.0, 0.0], 0.0).line_coefficients().unwrap(),
            Boundary::Vertical { x1: 0.5 }
        );
        assert_eq!(
            linear(&[0.0, 0.0], 0.0).line_coefficients(),
            Err(Error::DegenerateBoundary)
        );
        assert!(matches!(
            linear(&[1.0], 0.0).line_coefficients(),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::from_name(f.name()), Some(f));
        }
    }

    #[test]
    fn stable_logistic_helpers() {
        assert_abs_diff_eq!(softplus(0.0), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(softplus(800.0), 800.0);
        assert!(softplus(-800.0) >= 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0).is_finite());
    }
}
