use std::path::PathBuf;

use clap::Args;
use ssllab::classifier::{Classifier, Trainer};
use ssllab::split_labeled_unlabeled;

use super::flag_error;
use crate::datafile::{DataFile, DEFAULT_LABEL_COL};
use crate::error::CliResult;
use crate::modelfile::ModelFile;
use crate::resolve_seed;
use crate::spec::{build_classifier, ParamSet, Value};

/// Hyperparameters; each model uses a subset and rejects the rest.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Ridge penalty (Laplacian methods: lambda of the RKHS norm).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Laplacian penalty.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// SVM cost.
    #[arg(long = "c")]
    pub c: Option<f64>,
    /// linear or rbf.
    #[arg(long)]
    pub kernel: Option<String>,
    /// rbf parameter in exp(-sigma ||x - z||^2).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Covariance regularization (lda, em-lda).
    #[arg(long)]
    pub reg: Option<f64>,
    /// Entropy weight (erlr).
    #[arg(long)]
    pub lambda_entropy: Option<f64>,
    /// Base classifier of self-learning.
    #[arg(long)]
    pub base: Option<String>,
    /// Self-learning rounds or EM iterations.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Neighbours in the knn graph (laprls, lapsvm).
    #[arg(long)]
    pub graph_k: Option<usize>,
    /// Graph weight scale: knn-median, median or a fixed number.
    #[arg(long)]
    pub graph_weight: Option<String>,
}

impl ModelArgs {
    pub fn to_params(&self) -> ParamSet {
        let mut p = ParamSet::new();
        p.set_opt_num("lambda", self.lambda);
        p.set_opt_num("gamma", self.gamma);
        p.set_opt_num("c", self.c);
        p.set_opt_text("kernel", self.kernel.as_deref());
        p.set_opt_num("sigma", self.sigma);
        p.set_opt_num("reg", self.reg);
        p.set_opt_num("lambda_entropy", self.lambda_entropy);
        p.set_opt_text("base", self.base.as_deref());
        p.set_opt_num("max_iter", self.max_iter.map(|v| v as f64));
        p.set_opt_num("graph_k", self.graph_k.map(|v| v as f64));
        if let Some(w) = &self.graph_weight {
            p.set("graph_weight", Value::Text(w.clone()));
        }
        p
    }

    pub fn classifier(&self, model: &str) -> CliResult<Classifier> {
        let mut p = self.to_params();
        let c = build_classifier(model, &mut p).map_err(flag_error)?;
        p.finish(model).map_err(flag_error)?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// One of ls, kls, nm, lda, logistic, svm, self-learning, em-nm, em-lda,
    /// mc-nm, usm, icls, icls-projection, erlr, laprls, lapsvm.
    #[arg(long)]
    pub model: String,
    #[command(flatten)]
    pub params: ModelArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COL)]
    pub label_col: String,
    /// Recorded in the model file.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

pub fn run(a: &TrainArgs) -> CliResult<()> {
    let classifier = a.params.classifier(&a.model)?;
    let seed = resolve_seed(a.seed)?;
    let file = DataFile::read_labeled(&a.input, &a.label_col)?;
    file.require_labels(&a.label_col)?;
    let d = file.to_dataset(&a.label_col, None)?;
    let (data, _) = split_labeled_unlabeled(&d);
    let m = classifier.fit(&data)?;
    ModelFile::from_model(&m, Some(seed)).write(&a.output)?;
    let loss = m.mean_loss(&data.x_l, &data.y_l)?;
    let pred = m.predict(&data.x_l)?;
    let correct = pred.iter().zip(&data.y_l).filter(|(p, y)| p == y).count();
    println!(
        "{}: {} trained on {} labeled and {} unlabeled rows (classes {}, {})",
        a.output.display(),
        m.family.name(),
        data.n_labeled(),
        data.n_unlabeled(),
        m.classes.name(0),
        m.classes.name(1)
    );
    println!("mean training loss {loss:.6}");
    println!(
        "training accuracy {:.4} ({correct}/{})",
        correct as f64 / data.n_labeled() as f64,
        data.n_labeled()
    );
    for w in &m.meta.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
