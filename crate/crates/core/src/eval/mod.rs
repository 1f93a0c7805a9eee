//! Experiment protocols: label removal, splits, performance measures,
//! learning curves and cross-validation.

mod measures;
mod missing;
mod protocol;
mod results;
mod split;

pub use measures::{measure_error, measure_loss_all, measure_loss_test, Measure, Trial};
pub use missing::{add_missing_labels_mar, true_labels};
pub use protocol::{cross_validation_ssl, learning_curve_ssl, CvPlan, NamedTrainer, TrialPlan};
pub use results::{ExperimentResult, Record, SummaryRow, TrialFailure};
pub use split::{split_dataset_ssl, split_indices, SplitIndices, SslSplit};

/// Attempts at drawing a labeled set with the required class counts.
pub const MAX_SPLIT_ATTEMPTS: usize = 1000;
