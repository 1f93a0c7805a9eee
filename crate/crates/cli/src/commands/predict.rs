use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use crate::datafile::{DataFile, DEFAULT_LABEL_COL};
use crate::error::{CliError, CliResult};
use crate::modelfile::ModelFile;
use crate::output::{num, write_atomic};

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Ignored as a feature when present; used to report accuracy.
    #[arg(long, default_value = DEFAULT_LABEL_COL)]
    pub label_col: String,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

pub fn run(a: &PredictArgs) -> CliResult<()> {
    let m = ModelFile::read(&a.model)?.to_model()?;
    let file = DataFile::read(&a.input, &a.label_col)?;
    if file.x.ncols() != m.dim() {
        return Err(CliError::runtime(format!(
            "model expects {} feature columns, {} has {}",
            m.dim(),
            a.input.display(),
            file.x.ncols()
        )));
    }
    let mut out = String::from("row,predicted,decision_value\n");
    let n = file.x.nrows();
    let (names, values) = if n == 0 {
        (Vec::new(), Vec::new())
    } else {
        (m.predict_names(&file.x)?, m.decision_values(&file.x)?.iter().copied().collect())
    };
    for (i, (p, v)) in names.iter().zip(&values).enumerate() {
        let _ = writeln!(out, "{i},{p},{}", num(*v));
    }
    write_atomic(&a.output, out.as_bytes())?;
    println!("{}: {n} predictions", a.output.display());
    if let Some(labels) = &file.labels {
        let pairs: Vec<(&String, &String)> = labels
            .iter()
            .zip(&names)
            .filter_map(|(l, p)| l.as_ref().map(|l| (l, p)))
            .collect();
        if !pairs.is_empty() {
            let correct = pairs.iter().filter(|(l, p)| l == p).count();
            println!(
                "accuracy {:.4} ({correct}/{})",
                correct as f64 / pairs.len() as f64,
                pairs.len()
            );
        }
    }
    Ok(())
}
