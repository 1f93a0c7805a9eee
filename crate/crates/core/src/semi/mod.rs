//! Semi-supervised estimators.

mod em;
mod erlr;
mod icls;
mod laplacian;
mod moment;
mod self_learning;
mod usm;

pub use em::{observed_log_likelihood, train_em, train_em_traced, EmSettings, GenerativeFamily};
pub use erlr::{binary_entropy, erlr_objective, train_erlr, ErlrObjective};
pub use icls::{box_least_squares, train_icls, train_icls_projection, IclsProblem};
pub use laplacian::{laplacian_svm_objective, train_laplacian_rls, train_laplacian_svm, LapParams};
pub use moment::train_moment_constrained_nmc;
pub use self_learning::self_learning;
pub use usm::train_usm_least_squares;
