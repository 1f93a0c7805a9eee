use nalgebra::{DMatrix, DVector};

use crate::data::{Target, TrainingData};
use crate::error::{Error, Result};
use crate::kernel::{gram_self, Kernel};
use crate::model::{Family, KernelLoss, KernelParams, Params, TrainedModel, TrainingMeta};
use crate::optim::{minimize, solve_vec, Minimum, Objective, OptimSettings};

/// Squared-hinge objective in representer form over `theta = (alpha, b)`:
///
/// `(1/n_l) sum_{i < n_l} max(0, 1 - y_i f_i)^2 + lambda alpha' K alpha + gamma f' L f`
///
/// with `f = K alpha + b 1` over all points, labeled points first.
#[derive(Debug, Clone)]
pub struct SquaredHinge {
    k: DMatrix<f64>,
    y: DVector<f64>,
    lambda: f64,
    laplacian: Option<(DMatrix<f64>, f64)>,
}

impl SquaredHinge {
    pub(crate) fn new(
        k: DMatrix<f64>,
        y: DVector<f64>,
        lambda: f64,
        laplacian: Option<(DMatrix<f64>, f64)>,
    ) -> Self {
        SquaredHinge {
            k,
            y,
            lambda,
            laplacian,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.k.nrows() + 1
    }

    fn outputs(&self, theta: &DVector<f64>) -> DVector<f64> {
        let n = self.k.nrows();
        (&self.k * theta.rows(0, n)).add_scalar(theta[n])
    }

    fn hinge(&self, f: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.y.len(), |i, _| (1.0 - self.y[i] * f[i]).max(0.0))
    }
}

impl Objective for SquaredHinge {
    fn eval(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let n = self.k.nrows();
        let nl = self.y.len() as f64;
        let alpha = theta.rows(0, n);
        let f = self.outputs(theta);
        let h = self.hinge(&f);
        let ka = &self.k * alpha;
        let mut value = h.norm_squared() / nl + self.lambda * alpha.dot(&ka);
        let mut r = DVector::zeros(n);
        for i in 0..self.y.len() {
            r[i] = -2.0 / nl * self.y[i] * h[i];
        }
        let mut p = &r + alpha * (2.0 * self.lambda);
        let mut gb = r.sum();
        if let Some((l, gamma)) = &self.laplacian {
            let lf = l * &f;
            value += gamma * f.dot(&lf);
            p.axpy(2.0 * gamma, &lf, 1.0);
            gb += 2.0 * gamma * lf.sum();
        }
        let mut g = DVector::zeros(n + 1);
        g.rows_mut(0, n).copy_from(&(&self.k * p));
        g[n] = gb;
        (value, g)
    }

    /// Newton direction for the piecewise quadratic objective, with the common
    /// factor `K` cancelled from the alpha block so `K` is never inverted.
    fn direction(&self, theta: &DVector<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
        let n = self.k.nrows();
        let nl = self.y.len() as f64;
        let alpha = theta.rows(0, n);
        let f = self.outputs(theta);
        let h = self.hinge(&f);
        let mut e = DMatrix::zeros(n, n);
        for i in 0..self.y.len() {
            if h[i] > 0.0 {
                e[(i, i)] = 2.0 / nl;
            }
        }
        let mut p = DVector::zeros(n);
        for i in 0..self.y.len() {
            p[i] = -2.0 / nl * self.y[i] * h[i];
        }
        p.axpy(2.0 * self.lambda, &alpha, 1.0);
        if let Some((l, gamma)) = &self.laplacian {
            e += l * (2.0 * gamma);
            p.axpy(2.0 * gamma, &(l * &f), 1.0);
        }
        let ek = &e * &self.k;
        let e1 = e.column_sum();
        let mut sys = DMatrix::zeros(n + 1, n + 1);
        sys.view_mut((0, 0), (n, n)).copy_from(&ek);
        for i in 0..n {
            sys[(i, i)] += 2.0 * self.lambda;
            sys[(i, n)] = e1[i];
        }
        let top = ek.row_sum();
        for j in 0..n {
            sys[(n, j)] = top[j];
        }
        sys[(n, n)] = e1.sum();
        let mut rhs = p;
        rhs = rhs.insert_row(n, grad[n]);
        solve_vec(&sys, &rhs).ok()
    }
}

/// Minimize a [`SquaredHinge`] objective from zero.
pub(crate) fn fit_squared_hinge(obj: &SquaredHinge, s: &OptimSettings) -> Result<Minimum> {
    minimize(obj, DVector::zeros(obj.n_vars()), s)
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    Ok(())
}

/// The objective minimized by [`train_svm`]: `lambda = 1 / (2 C n_l)`.
pub fn svm_objective(data: &TrainingData, kernel: Kernel, c: f64) -> Result<SquaredHinge> {
    check_c(c)?;
    data.require_labeled()?;
    let k = gram_self(&kernel, &data.x_l)?;
    let lambda = 1.0 / (2.0 * c * data.n_labeled() as f64);
    Ok(SquaredHinge::new(
        k,
        Target::PlusMinusOne.encode(&data.y_l),
        lambda,
        None,
    ))
}

/// Primal kernel SVM with squared hinge loss:
/// `(1/(2 C n_l)) alpha' K alpha + (1/n_l) sum_i max(0, 1 - y_i f(x_i))^2`.
pub fn train_svm(
    data: &TrainingData,
    kernel: Kernel,
    c: f64,
    s: &OptimSettings,
) -> Result<TrainedModel> {
    data.require_both_classes()?;
    let obj = svm_objective(data, kernel, c)?;
    let r = fit_squared_hinge(&obj, s)?;
    Ok(kernel_sqhinge_model(Family::Svm, data, data.x_l.clone(), kernel, &r))
}

pub(crate) fn kernel_sqhinge_model(
    family: Family,
    data: &TrainingData,
    support: DMatrix<f64>,
    kernel: Kernel,
    r: &Minimum,
) -> TrainedModel {
    let n = support.nrows();
    let mut meta = TrainingMeta {
        converged: r.converged,
        iterations: r.iterations,
        warnings: Vec::new(),
    };
    if !r.converged {
        meta.warnings
            .push(format!("{} optimizer did not converge", family.name()));
    }
    TrainedModel::new(
        family,
        data.classes.clone(),
        Params::Kernel(KernelParams {
            alpha: r.x.rows(0, n).into_owned(),
            bias: r.x[n],
            support,
            kernel,
            target: Target::PlusMinusOne,
            loss: KernelLoss::SquaredHinge,
        }),
        meta,
    )
}
