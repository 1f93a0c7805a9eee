pub mod boundary;
pub mod generate;
pub mod learning_curve;
pub mod predict;
pub mod replicate;
pub mod train;

use nalgebra::DMatrix;
use ssllab::TrainedModel;

use crate::error::{CliError, CliResult};
use crate::spec::SpecError;

pub(crate) fn flag_error(e: SpecError) -> CliError {
    CliError::usage(e.flag_message())
}

/// Grid axes over `bounds` and the model's decision values at every grid
/// point, x1 varying fastest.
pub(crate) fn decision_grid(
    m: &TrainedModel,
    bounds: [(f64, f64); 2],
    g: usize,
) -> CliResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..g).map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64).collect()
    };
    let (xs, ys) = (axis(bounds[0]), axis(bounds[1]));
    let pts = DMatrix::from_fn(g * g, 2, |r, c| if c == 0 { xs[r % g] } else { ys[r / g] });
    let v = m.decision_values(&pts).map_err(CliError::from)?;
    Ok((xs, ys, v.iter().copied().collect()))
}

pub(crate) fn rows_2d(x: &DMatrix<f64>) -> Vec<(f64, f64)> {
    (0..x.nrows()).map(|i| (x[(i, 0)], x[(i, 1)])).collect()
}
