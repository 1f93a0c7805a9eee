//! Semi-supervised binary classification: supervised baselines, their
//! semi-supervised extensions, graph-based label propagation, simulated
//! datasets and learning-curve / cross-validation protocols.
//!
//! Every classifier is trained from a [`TrainingData`] (labeled rows plus an
//! unlabeled matrix) and yields a [`TrainedModel`] with a uniform interface:
//! predictions, decision values, per-example surrogate loss, responsibilities
//! for the unlabeled rows and, for linear models, the 2-d boundary line.

pub mod classifier;
pub mod data;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod graph;
pub mod kernel;
pub mod model;
pub mod optim;
pub mod semi;
pub mod supervised;

pub use classifier::{Classifier, Trainer};
pub use data::{split_labeled_unlabeled, ClassOrder, Dataset, Target, TrainingData};
pub use error::{Error, Result};
pub use graph::{build_graph, harmonic_energy_min, Adjacency, Graph, GraphConfig, WeightScale};
pub use kernel::{gram_matrix, Kernel};
pub use model::{Boundary, Family, Params, TrainedModel, TrainingMeta};
pub use optim::OptimSettings;
pub use semi::LapParams;
