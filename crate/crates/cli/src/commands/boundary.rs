use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use super::{decision_grid, rows_2d};
use crate::datafile::{DataFile, DEFAULT_LABEL_COL};
use crate::error::{CliError, CliResult};
use crate::modelfile::ModelFile;
use crate::output::{num, write_atomic};
use crate::svg::{marching_squares, padded_bounds, Plot, CLASS_COLORS, UNLABELED_COLOR};

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Data whose bounding box (padded 10%) sets the grid; also drawn in the SVG.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = DEFAULT_LABEL_COL)]
    pub label_col: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn run(a: &BoundaryArgs) -> CliResult<()> {
    if a.grid < 2 {
        return Err(CliError::usage("--grid: need at least 2 points per axis"));
    }
    let m = ModelFile::read(&a.model)?.to_model()?;
    if m.dim() != 2 {
        return Err(CliError::runtime(format!(
            "decision boundaries need a 2-d model; this one has {} features",
            m.dim()
        )));
    }
    let file = DataFile::read(&a.input, &a.label_col)?;
    if file.x.ncols() != 2 {
        return Err(CliError::runtime(format!(
            "decision boundaries need 2 feature columns; {} has {}",
            a.input.display(),
            file.x.ncols()
        )));
    }
    if file.x.nrows() == 0 {
        return Err(CliError::runtime(format!("{} has no rows", a.input.display())));
    }
    let pts = rows_2d(&file.x);
    let bounds = padded_bounds(pts.iter().copied(), 0.1);
    let (xs, ys, v) = decision_grid(&m, bounds, a.grid)?;
    let mut out = String::from("x1,x2,decision_value\n");
    for (k, value) in v.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", num(xs[k % a.grid]), num(ys[k / a.grid]), num(*value));
    }
    write_atomic(&a.output, out.as_bytes())?;
    println!("{}: {}x{} grid", a.output.display(), a.grid, a.grid);

    if let Some(svg_path) = &a.svg {
        let mut groups: [Vec<(f64, f64)>; 3] = Default::default();
        for (i, p) in pts.iter().enumerate() {
            let g = match file.labels.as_ref().and_then(|l| l[i].as_deref()) {
                None => 2,
                Some(name) => m.classes.index_of(name).map_err(|_| {
                    CliError::runtime(format!(
                        "row {}: label '{name}' is not a class of the model",
                        i + 1
                    ))
                })?,
            };
            groups[g].push(*p);
        }
        let mut plot = Plot::new(bounds, true, &format!("{} decision boundary", m.family.name()));
        plot.points(&groups[2], UNLABELED_COLOR, 2.5, "unlabeled");
        for c in 0..2 {
            plot.points(&groups[c], CLASS_COLORS[c], 3.5, &format!("class-{c}"));
            plot.legend(m.classes.name(c), CLASS_COLORS[c]);
        }
        plot.segments(&marching_squares(&xs, &ys, &v, 0.0), "black", "contour");
        write_atomic(svg_path, plot.finish().as_bytes())?;
        println!("{}: boundary plot", svg_path.display());
    }
    Ok(())
}
