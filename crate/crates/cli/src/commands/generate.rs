use std::path::PathBuf;

use clap::Args;
use ssllab::eval::add_missing_labels_mar;
use ssllab::Dataset;

use super::flag_error;
use crate::datafile::{write_dataset, DEFAULT_LABEL_COL};
use crate::error::{CliError, CliResult};
use crate::resolve_seed;
use crate::spec::{generate_dataset, ParamSet};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// two-gaussian, crescent-moon, spirals, parallel-planes or two-circles.
    #[arg(long)]
    pub dataset: String,
    /// Total rows (two-gaussian).
    #[arg(long)]
    pub n: Option<usize>,
    /// Dimension (two-gaussian, default 2).
    #[arg(long)]
    pub d: Option<usize>,
    /// Cluster variance (two-gaussian, default 1).
    #[arg(long)]
    pub variance: Option<f64>,
    /// Classes follow the clusters (two-gaussian, default true).
    #[arg(long)]
    pub expected: Option<bool>,
    /// Rows per class (all other datasets).
    #[arg(long)]
    pub n_per_class: Option<usize>,
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Spiral turns (default 1.5).
    #[arg(long)]
    pub turns: Option<f64>,
    /// Remove each label independently with this probability.
    #[arg(long)]
    pub missing_prob: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = DEFAULT_LABEL_COL)]
    pub label_col: String,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

pub fn build(a: &GenerateArgs, seed: u64) -> CliResult<Dataset> {
    let mut p = ParamSet::new();
    p.set_opt_num("n", a.n.map(|v| v as f64));
    p.set_opt_num("d", a.d.map(|v| v as f64));
    p.set_opt_num("variance", a.variance);
    p.set_opt_bool("expected", a.expected);
    p.set_opt_num("n_per_class", a.n_per_class.map(|v| v as f64));
    p.set_opt_num("sigma", a.sigma);
    p.set_opt_num("turns", a.turns);
    let d = generate_dataset(&a.dataset, &mut p, seed).map_err(flag_error)?;
    p.finish(&a.dataset).map_err(flag_error)?;
    match a.missing_prob {
        Some(prob) => add_missing_labels_mar(&d, prob, seed ^ 0x004d_4152)
            .map_err(|e| CliError::usage(format!("--missing-prob: {e}"))),
        None => Ok(d),
    }
}

pub fn run(a: &GenerateArgs) -> CliResult<()> {
    let seed = resolve_seed(a.seed)?;
    let d = build(a, seed)?;
    write_dataset(&a.output, &d, &a.label_col)?;
    let count = |c: usize| d.labels().iter().filter(|l| **l == Some(c)).count();
    println!(
        "{}: {} rows, {} features; {} {}, {} {}, {} unlabeled; seed {seed}",
        a.output.display(),
        d.len(),
        d.dim(),
        d.classes().name(0),
        count(0),
        d.classes().name(1),
        count(1),
        d.len() - d.labeled_count()
    );
    Ok(())
}
