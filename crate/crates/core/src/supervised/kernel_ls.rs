use nalgebra::{DMatrix, DVector};

use crate::data::{Target, TrainingData};
use crate::error::Result;
use crate::kernel::{gram_self, Kernel};
use crate::model::{Family, KernelLoss, KernelParams, Params, TrainedModel, TrainingMeta};
use crate::optim::solve_with_jitter;

use super::least_squares::check_lambda;

/// Kernel ridge regression on 0/1 targets, `f(x) = sum_i alpha_i k(x_i, x) + b`,
/// minimizing `||K alpha + b - y||^2 / n_l + lambda alpha' K alpha` with `b` free.
///
/// With `M = K + lambda n_l I` the solution is `alpha = M^-1 (y - b)` where `b`
/// makes `1' alpha = 0`. The bias is the least-squares intercept, which equals
/// the target mean when the Gram matrix is centered, and a linear kernel gives
/// exactly the primal least-squares classifier.
pub fn train_kernel_least_squares(
    data: &TrainingData,
    kernel: Kernel,
    lambda: f64,
) -> Result<TrainedModel> {
    data.require_labeled()?;
    check_lambda(lambda)?;
    let n = data.n_labeled();
    let mut m = gram_self(&kernel, &data.x_l)?;
    for i in 0..n {
        m[(i, i)] += lambda * n as f64;
    }
    let y = Target::ZeroOne.encode(&data.y_l);
    let rhs = DMatrix::from_fn(n, 2, |i, j| if j == 0 { y[i] } else { 1.0 });
    let sol = solve_with_jitter(&m, &rhs)?;
    let (u, v) = (sol.column(0), sol.column(1));
    let bias = u.sum() / v.sum();
    let alpha: DVector<f64> = u - v * bias;
    Ok(TrainedModel::new(
        Family::KernelLeastSquares,
        data.classes.clone(),
        Params::Kernel(KernelParams {
            alpha,
            bias,
            support: data.x_l.clone(),
            kernel,
            target: Target::ZeroOne,
            loss: KernelLoss::Squared,
        }),
        TrainingMeta::closed_form(),
    ))
}
