use nalgebra::{DMatrix, DVector};

use crate::data::{Target, TrainingData};
use crate::error::{Error, Result};
use crate::graph::{build_graph, GraphConfig};
use crate::kernel::{gram_self, Kernel};
use crate::model::{Family, KernelLoss, KernelParams, Params, TrainedModel, TrainingMeta};
use crate::optim::{solve_with_jitter, OptimSettings};
use crate::supervised::{fit_squared_hinge, SquaredHinge};

/// Ambient (`lambda`) and intrinsic (`gamma`) regularization weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LapParams {
    pub lambda: f64,
    pub gamma: f64,
}

impl LapParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("gamma", self.gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Laplacian over all points, or `None` when the intrinsic term is switched off.
fn laplacian(x_all: &DMatrix<f64>, gamma: f64, cfg: &GraphConfig) -> Result<Option<DMatrix<f64>>> {
    if gamma == 0.0 {
        return Ok(None);
    }
    Ok(Some(build_graph(x_all, cfg)?.laplacian))
}

/// Laplacian regularized least squares on ±1 targets with an unpenalized bias:
/// minimizes `(1/n_l) sum_l (f_i - y_i)^2 + lambda alpha' K alpha + (gamma / n_all^2) f' L f`
/// over `f = K alpha + b`. The stationarity conditions give
///
/// `(J K + lambda n_l I + (gamma n_l / n_all^2) L K) alpha + b J 1 = J y`
/// `1' J K alpha + n_l b = 1' J y`
///
/// with `J` selecting the labeled points.
pub fn train_laplacian_rls(
    data: &TrainingData,
    kernel: Kernel,
    p: &LapParams,
    graph: &GraphConfig,
) -> Result<TrainedModel> {
    data.require_labeled()?;
    p.validate()?;
    let x_all = data.all_features();
    let n = x_all.nrows();
    let nl = data.n_labeled();
    let k = gram_self(&kernel, &x_all)?;
    let l = laplacian(&x_all, p.gamma, graph)?;
    let y = Target::PlusMinusOne.encode(&data.y_l);
    let mut sys = DMatrix::zeros(n + 1, n + 1);
    let mut rhs = DVector::zeros(n + 1);
    for i in 0..nl {
        for j in 0..n {
            sys[(i, j)] = k[(i, j)];
            sys[(n, j)] += k[(i, j)];
        }
        sys[(i, n)] = 1.0;
        rhs[i] = y[i];
        rhs[n] += y[i];
    }
    sys[(n, n)] = nl as f64;
    for i in 0..n {
        sys[(i, i)] += p.lambda * nl as f64;
    }
    if let Some(l) = &l {
        let lk = l * &k * (p.gamma * nl as f64 / (n * n) as f64);
        let mut block = sys.view_mut((0, 0), (n, n));
        block += lk;
    }
    let sol = solve_with_jitter(&sys, &DMatrix::from_column_slice(n + 1, 1, rhs.as_slice()))?;
    Ok(TrainedModel::new(
        Family::LaplacianRls,
        data.classes.clone(),
        Params::Kernel(KernelParams {
            alpha: sol.view((0, 0), (n, 1)).column(0).into_owned(),
            bias: sol[(n, 0)],
            support: x_all,
            kernel,
            target: Target::PlusMinusOne,
            loss: KernelLoss::Squared,
        }),
        TrainingMeta::closed_form(),
    ))
}

/// The objective minimized by [`train_laplacian_svm`].
pub fn laplacian_svm_objective(
    data: &TrainingData,
    kernel: Kernel,
    p: &LapParams,
    graph: &GraphConfig,
) -> Result<SquaredHinge> {
    data.require_labeled()?;
    p.validate()?;
    let x_all = data.all_features();
    let n = x_all.nrows() as f64;
    let k = gram_self(&kernel, &x_all)?;
    let l = laplacian(&x_all, p.gamma, graph)?.map(|l| (l, p.gamma / (n * n)));
    Ok(SquaredHinge::new(
        k,
        Target::PlusMinusOne.encode(&data.y_l),
        p.lambda,
        l,
    ))
}

/// Laplacian SVM with squared hinge loss over all points in representer form:
/// `(1/n_l) sum_l max(0, 1 - y_i f_i)^2 + lambda alpha' K alpha + (gamma / n_all^2) f' L f`.
pub fn train_laplacian_svm(
    data: &TrainingData,
    kernel: Kernel,
    p: &LapParams,
    graph: &GraphConfig,
    s: &OptimSettings,
) -> Result<TrainedModel> {
    data.require_both_classes()?;
    let obj = laplacian_svm_objective(data, kernel, p, graph)?;
    let r = fit_squared_hinge(&obj, s)?;
    Ok(crate::supervised::kernel_sqhinge_model(
        Family::LaplacianSvm,
        data,
        data.all_features(),
        kernel,
        &r,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ClassOrder;

    #[test]
    fn constant_labels_fit_positive() {
        let data = TrainingData::new(
            DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]),
            vec![1, 1, 1],
            DMatrix::from_row_slice(2, 1, &[0.5, 1.5]),
            ClassOrder::new("A", "B").unwrap(),
        )
        .unwrap();
        let p = LapParams {
            lambda: 1e-6,
            gamma: 1.0,
        };
        let m = train_laplacian_rls(&data, Kernel::Rbf { sigma: 1.0 }, &p, &GraphConfig::default().with_k(2))
            .unwrap();
        assert!(m.decision_values(&data.x_l).unwrap().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn negative_parameters_rejected() {
        let p = LapParams {
            lambda: -1.0,
            gamma: 0.0,
        };
        assert!(p.validate().is_err());
    }
}
