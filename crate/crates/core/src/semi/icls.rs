use nalgebra::{DMatrix, DVector};

use crate::data::{Target, TrainingData};
use crate::error::Result;
use crate::model::{Family, Link, Params, TrainedModel, TrainingMeta};
use crate::optim::{minimize_box, solve_with_jitter, Minimum, OptimSettings};
use crate::supervised::{augment, check_lambda, linear_model, ridge_penalty, train_least_squares};

/// A criterion `||c0 + C q||^2 + offset` over soft labels `q`, together with the
/// affine map `theta(q) = theta0 + B q` from soft labels to the ridge fit on
/// labeled plus soft-labeled data.
#[derive(Debug, Clone, PartialEq)]
pub struct IclsProblem {
    pub theta0: DVector<f64>,
    pub b: DMatrix<f64>,
    pub c0: DVector<f64>,
    pub c: DMatrix<f64>,
    pub offset: f64,
}

/// `theta0` and `B` for the ridge fit `(A'A + lambda n_all I*) theta = A' [y; q]`.
fn soft_label_map(data: &TrainingData, lambda: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let a = augment(&data.all_features());
    let a_l = augment(&data.x_l);
    let a_u = augment(&data.x_u);
    let n_all = a.nrows() as f64;
    let g = a.transpose() * &a + ridge_penalty(data.dim(), lambda * n_all);
    let y = Target::ZeroOne.encode(&data.y_l);
    let mut rhs = DMatrix::zeros(g.nrows(), 1 + data.n_unlabeled());
    rhs.set_column(0, &(a_l.transpose() * y));
    rhs.view_mut((0, 1), (g.nrows(), data.n_unlabeled()))
        .copy_from(&a_u.transpose());
    let sol = solve_with_jitter(&g, &rhs)?;
    let theta0 = sol.column(0).into_owned();
    let b = sol.columns(1, data.n_unlabeled()).into_owned();
    Ok((theta0, b))
}

impl IclsProblem {
    /// Mean squared loss of `theta(q)` on the labeled data.
    pub fn labeled_loss(data: &TrainingData, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let (theta0, b) = soft_label_map(data, lambda)?;
        let a_l = augment(&data.x_l);
        let s = 1.0 / (data.n_labeled() as f64).sqrt();
        let r0 = (&a_l * &theta0 - Target::ZeroOne.encode(&data.y_l)) * s;
        let qr = a_l.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let c0 = q.transpose() * &r0;
        let offset = (r0.norm_squared() - c0.norm_squared()).max(0.0);
        let c = r * &b * s;
        Ok(IclsProblem {
            theta0,
            b,
            c0,
            c,
            offset,
        })
    }

    /// `(theta(q) - theta_sup)' M (theta(q) - theta_sup)` with `M` the all-data
    /// second moment of the augmented design.
    pub fn projection(data: &TrainingData, lambda: f64, theta_sup: &DVector<f64>) -> Result<Self> {
        check_lambda(lambda)?;
        let (theta0, b) = soft_label_map(data, lambda)?;
        let a = augment(&data.all_features());
        let r = a.clone().qr().r() / (a.nrows() as f64).sqrt();
        let c0 = &r * (&theta0 - theta_sup);
        let c = &r * &b;
        Ok(IclsProblem {
            theta0,
            b,
            c0,
            c,
            offset: 0.0,
        })
    }

    pub fn theta(&self, q: &DVector<f64>) -> DVector<f64> {
        &self.theta0 + &self.b * q
    }

    pub fn value(&self, q: &DVector<f64>) -> f64 {
        (&self.c0 + &self.c * q).norm_squared() + self.offset
    }
}

fn max_feasible_step(q: &DVector<f64>, free: &[usize], delta: &DVector<f64>) -> f64 {
    let mut t = 1.0f64;
    for (k, &i) in free.iter().enumerate() {
        let limit = if delta[k] > 0.0 {
            (1.0 - q[i]) / delta[k]
        } else if delta[k] < 0.0 {
            q[i] / -delta[k]
        } else {
            continue;
        };
        t = t.min(limit);
    }
    t.max(0.0)
}

/// Active-set refinement for `min ||c0 + C q||^2` on `[0, 1]^u`: repeatedly
/// solve the unconstrained problem over the free variables (minimum-norm
/// solution), move as far as the box allows, and update the free set.
/// Returns the number of rounds and whether the KKT conditions hold.
fn polish(c0: &DVector<f64>, c: &DMatrix<f64>, q: &mut DVector<f64>) -> (usize, bool) {
    let u = q.len();
    let max_rounds = 3 * u + 20;
    let c_scale = c.amax().max(f64::MIN_POSITIVE);
    for round in 1..=max_rounds {
        let r = c0 + c * &*q;
        let g = c.transpose() * &r;
        let gtol = 1e-12 * c_scale * (1.0 + r.amax());
        let mut free: Vec<usize> = (0..u)
            .filter(|&i| {
                (q[i] > 0.0 && q[i] < 1.0)
                    || (q[i] == 0.0 && g[i] < -gtol)
                    || (q[i] == 1.0 && g[i] > gtol)
            })
            .collect();
        let delta = loop {
            if free.is_empty() {
                return (round, true);
            }
            let cf = DMatrix::from_fn(c.nrows(), free.len(), |i, k| c[(i, free[k])]);
            let svd = cf.svd(true, true);
            let eps = svd.singular_values.max() * 1e-12;
            let delta = -svd
                .solve(&r, eps)
                .expect("both singular vector sets were computed");
            let before = free.len();
            let kept: Vec<(usize, f64)> = free
                .iter()
                .zip(delta.iter())
                .filter(|(&i, &d)| !((q[i] == 0.0 && d < 0.0) || (q[i] == 1.0 && d > 0.0)))
                .map(|(&i, &d)| (i, d))
                .collect();
            if kept.len() == before {
                break delta;
            }
            free = kept.into_iter().map(|(i, _)| i).collect();
        };
        if delta.amax() <= 1e-13 {
            return (round, true);
        }
        let t = max_feasible_step(q, &free, &delta);
        for (k, &i) in free.iter().enumerate() {
            let v = q[i] + t * delta[k];
            q[i] = if v <= 1e-14 {
                0.0
            } else if v >= 1.0 - 1e-14 {
                1.0
            } else {
                v
            };
        }
    }
    (max_rounds, false)
}

/// Minimize `||c0 + C q||^2` over `q` in `[0, 1]^u`: projected gradient from
/// `q = 0.5`, followed by an active-set refinement to machine precision.
pub fn box_least_squares(c0: &DVector<f64>, c: &DMatrix<f64>, s: &OptimSettings) -> Result<Minimum> {
    let u = c.ncols();
    let f = |q: &DVector<f64>| {
        let r = c0 + c * q;
        (r.norm_squared(), c.transpose() * r * 2.0)
    };
    let lower = DVector::zeros(u);
    let upper = DVector::from_element(u, 1.0);
    let pg = minimize_box(&f, DVector::from_element(u, 0.5), &lower, &upper, s)?;
    let mut q = pg.x.clone();
    let (rounds, kkt) = polish(c0, c, &mut q);
    let value = (c0 + c * &q).norm_squared();
    if value <= pg.value {
        Ok(Minimum {
            x: q,
            value,
            iterations: pg.iterations + rounds,
            converged: kkt,
        })
    } else {
        Ok(pg)
    }
}

fn finish(
    family: Family,
    data: &TrainingData,
    problem: &IclsProblem,
    r: &Minimum,
) -> TrainedModel {
    let mut meta = TrainingMeta {
        converged: r.converged,
        iterations: r.iterations,
        warnings: Vec::new(),
    };
    if !r.converged {
        meta.warnings
            .push("soft-label optimization did not reach optimality".into());
    }
    linear_model(family, &data.classes, &problem.theta(&r.x), Link::Identity, meta)
        .with_responsibilities(r.x.iter().copied().collect())
}

fn supervised(family: Family, data: &TrainingData, lambda: f64) -> Result<TrainedModel> {
    let mut m = train_least_squares(data, lambda)?;
    m.family = family;
    Ok(m.with_responsibilities(Vec::new()))
}

/// Implicitly constrained least squares: among the ridge fits obtainable by
/// soft-labeling the unlabeled data with `q` in `[0, 1]^u`, choose the one with
/// the smallest squared loss on the labeled data.
pub fn train_icls(data: &TrainingData, lambda: f64, s: &OptimSettings) -> Result<TrainedModel> {
    data.require_labeled()?;
    if data.n_unlabeled() == 0 {
        return supervised(Family::Icls, data, lambda);
    }
    let problem = IclsProblem::labeled_loss(data, lambda)?;
    let r = box_least_squares(&problem.c0, &problem.c, s)?;
    Ok(finish(Family::Icls, data, &problem, &r))
}

/// Implicitly constrained projection: the soft-labeled fit closest to the
/// supervised solution in the metric of the all-data second moment.
pub fn train_icls_projection(data: &TrainingData, lambda: f64, s: &OptimSettings) -> Result<TrainedModel> {
    data.require_labeled()?;
    if data.n_unlabeled() == 0 {
        return supervised(Family::IclsProjection, data, lambda);
    }
    let sup = train_least_squares(&data.without_unlabeled(), lambda)?;
    let Params::Linear(p) = &sup.params else {
        unreachable!("least squares returns linear parameters")
    };
    let theta_sup = p.weights.clone().insert_row(p.weights.len(), p.intercept);
    let problem = IclsProblem::projection(data, lambda, &theta_sup)?;
    let r = box_least_squares(&problem.c0, &problem.c, s)?;
    Ok(finish(Family::IclsProjection, data, &problem, &r))
}
