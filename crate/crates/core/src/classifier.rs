//! A uniform trainer interface and a configuration enum covering every family.

use crate::data::TrainingData;
use crate::error::Result;
use crate::graph::GraphConfig;
use crate::kernel::Kernel;
use crate::model::{Family, TrainedModel};
use crate::optim::OptimSettings;
use crate::semi::{self, EmSettings, GenerativeFamily, LapParams};
use crate::supervised;

/// Anything that turns labeled plus unlabeled data into a model.
pub trait Trainer: Send + Sync {
    fn fit(&self, data: &TrainingData) -> Result<TrainedModel>;

    /// `false` for supervised trainers, which ignore `data.x_u`.
    fn uses_unlabeled(&self) -> bool;
}

/// Every classifier with its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    LeastSquares {
        lambda: f64,
    },
    KernelLeastSquares {
        kernel: Kernel,
        lambda: f64,
    },
    NearestMean,
    Lda {
        reg: f64,
    },
    Logistic {
        lambda: f64,
        settings: OptimSettings,
    },
    Svm {
        kernel: Kernel,
        c: f64,
        settings: OptimSettings,
    },
    SelfLearning {
        base: Box<Classifier>,
        max_iter: usize,
    },
    EmNearestMean {
        settings: EmSettings,
    },
    EmLda {
        settings: EmSettings,
    },
    MomentConstrainedNearestMean,
    UpdatedSecondMoment {
        lambda: f64,
    },
    Icls {
        lambda: f64,
        settings: OptimSettings,
    },
    IclsProjection {
        lambda: f64,
        settings: OptimSettings,
    },
    EntropyRegularizedLogistic {
        lambda_entropy: f64,
        lambda_ridge: f64,
        settings: OptimSettings,
    },
    LaplacianRls {
        kernel: Kernel,
        params: LapParams,
        graph: GraphConfig,
    },
    LaplacianSvm {
        kernel: Kernel,
        params: LapParams,
        graph: GraphConfig,
        settings: OptimSettings,
    },
}

impl Classifier {
    pub fn family(&self) -> Family {
        match self {
            Classifier::LeastSquares { .. } => Family::LeastSquares,
            Classifier::KernelLeastSquares { .. } => Family::KernelLeastSquares,
            Classifier::NearestMean => Family::NearestMean,
            Classifier::Lda { .. } => Family::Lda,
            Classifier::Logistic { .. } => Family::Logistic,
            Classifier::Svm { .. } => Family::Svm,
            Classifier::SelfLearning { .. } => Family::SelfLearning,
            Classifier::EmNearestMean { .. } => Family::EmNearestMean,
            Classifier::EmLda { .. } => Family::EmLda,
            Classifier::MomentConstrainedNearestMean => Family::MomentConstrainedNearestMean,
            Classifier::UpdatedSecondMoment { .. } => Family::UpdatedSecondMoment,
            Classifier::Icls { .. } => Family::Icls,
            Classifier::IclsProjection { .. } => Family::IclsProjection,
            Classifier::EntropyRegularizedLogistic { .. } => Family::EntropyRegularizedLogistic,
            Classifier::LaplacianRls { .. } => Family::LaplacianRls,
            Classifier::LaplacianSvm { .. } => Family::LaplacianSvm,
        }
    }

    /// The supervised counterpart a semi-supervised classifier reduces to
    /// without unlabeled data.
    pub fn supervised_counterpart(&self) -> Classifier {
        match self {
            Classifier::SelfLearning { base, .. } => (**base).clone(),
            Classifier::EmNearestMean { .. } | Classifier::MomentConstrainedNearestMean => {
                Classifier::NearestMean
            }
            Classifier::EmLda { settings } => Classifier::Lda { reg: settings.reg },
            Classifier::UpdatedSecondMoment { lambda }
            | Classifier::Icls { lambda, .. }
            | Classifier::IclsProjection { lambda, .. } => Classifier::LeastSquares { lambda: *lambda },
            Classifier::EntropyRegularizedLogistic {
                lambda_ridge,
                settings,
                ..
            } => Classifier::Logistic {
                lambda: *lambda_ridge,
                settings: *settings,
            },
            other => other.clone(),
        }
    }
}

impl Trainer for Classifier {
    fn fit(&self, data: &TrainingData) -> Result<TrainedModel> {
        match self {
            Classifier::LeastSquares { lambda } => supervised::train_least_squares(data, *lambda),
            Classifier::KernelLeastSquares { kernel, lambda } => {
                supervised::train_kernel_least_squares(data, *kernel, *lambda)
            }
            Classifier::NearestMean => supervised::train_nearest_mean(data),
            Classifier::Lda { reg } => supervised::train_lda(data, *reg),
            Classifier::Logistic { lambda, settings } => {
                supervised::train_logistic(data, *lambda, settings)
            }
            Classifier::Svm {
                kernel,
                c,
                settings,
            } => supervised::train_svm(data, *kernel, *c, settings),
            Classifier::SelfLearning { base, max_iter } => {
                semi::self_learning(base.as_ref(), data, *max_iter)
            }
            Classifier::EmNearestMean { settings } => {
                semi::train_em(data, GenerativeFamily::NearestMean, settings)
            }
            Classifier::EmLda { settings } => semi::train_em(data, GenerativeFamily::Lda, settings),
            Classifier::MomentConstrainedNearestMean => semi::train_moment_constrained_nmc(data),
            Classifier::UpdatedSecondMoment { lambda } => semi::train_usm_least_squares(data, *lambda),
            Classifier::Icls { lambda, settings } => semi::train_icls(data, *lambda, settings),
            Classifier::IclsProjection { lambda, settings } => {
                semi::train_icls_projection(data, *lambda, settings)
            }
            Classifier::EntropyRegularizedLogistic {
                lambda_entropy,
                lambda_ridge,
                settings,
            } => semi::train_erlr(data, *lambda_entropy, *lambda_ridge, settings),
            Classifier::LaplacianRls {
                kernel,
                params,
                graph,
            } => semi::train_laplacian_rls(data, *kernel, params, graph),
            Classifier::LaplacianSvm {
                kernel,
                params,
                graph,
                settings,
            } => semi::train_laplacian_svm(data, *kernel, params, graph, settings),
        }
    }

    fn uses_unlabeled(&self) -> bool {
        !matches!(
            self,
            Classifier::LeastSquares { .. }
                | Classifier::KernelLeastSquares { .. }
                | Classifier::NearestMean
                | Classifier::Lda { .. }
                | Classifier::Logistic { .. }
                | Classifier::Svm { .. }
        )
    }
}

impl<T: Trainer + ?Sized> Trainer for &T {
    fn fit(&self, data: &TrainingData) -> Result<TrainedModel> {
        (**self).fit(data)
    }

    fn uses_unlabeled(&self) -> bool {
        (**self).uses_unlabeled()
    }
}
