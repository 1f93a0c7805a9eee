//! Supervised baselines.

mod gaussian;
mod kernel_ls;
mod least_squares;
mod logistic;
mod svm;

pub use gaussian::{train_lda, train_nearest_mean};
pub use kernel_ls::train_kernel_least_squares;
pub use least_squares::train_least_squares;
pub use logistic::{logistic_objective, train_logistic, LogisticObjective};
pub use svm::{svm_objective, train_svm};

pub(crate) use gaussian::NMC_VARIANCE_FLOOR;
pub(crate) use least_squares::{augment, check_lambda, linear_model, ridge_penalty};
pub use svm::SquaredHinge;
pub(crate) use svm::{fit_squared_hinge, kernel_sqhinge_model};
