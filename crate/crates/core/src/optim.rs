//! Gradient descent with Armijo backtracking, projected gradient on boxes,
//! dense linear solves and a finite-difference gradient checker.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimSettings {
    pub max_iter: usize,
    /// Stop once the infinity norm of the (projected) gradient is at most this.
    pub grad_tol: f64,
    pub initial_step: f64,
    pub backtrack_factor: f64,
    pub sufficient_decrease: f64,
}

impl Default for OptimSettings {
    fn default() -> Self {
        OptimSettings {
            max_iter: 1000,
            grad_tol: 1e-7,
            initial_step: 1.0,
            backtrack_factor: 0.5,
            sufficient_decrease: 1e-4,
        }
    }
}

impl OptimSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_iter > 0
            && self.grad_tol > 0.0
            && self.initial_step > 0.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0
            && self.sufficient_decrease.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "invalid optimizer settings {self:?}"
            )))
        }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_grad_tol(mut self, grad_tol: f64) -> Self {
        self.grad_tol = grad_tol;
        self
    }
}

/// A differentiable objective.
pub trait Objective {
    /// Value and gradient at `x`.
    fn eval(&self, x: &DVector<f64>) -> (f64, DVector<f64>);

    /// Optional preconditioned search direction `d` (the step is `x - t d`).
    /// Must satisfy `grad . d > 0` whenever `grad != 0`; `None` means plain gradient.
    fn direction(&self, _x: &DVector<f64>, _grad: &DVector<f64>) -> Option<DVector<f64>> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&DVector<f64>) -> (f64, DVector<f64>),
{
    fn eval(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn is_finite(f: f64, g: &DVector<f64>) -> bool {
    f.is_finite() && g.iter().all(|v| v.is_finite())
}

/// Smallest trial step before the line search gives up.
const MIN_STEP: f64 = 1e-20;

/// Gradient descent with backtracking Armijo line search.
///
/// Along the plain gradient the trial step starts at `initial_step` and
/// afterwards at twice the last accepted step. A preconditioned direction is
/// always tried at `initial_step` first.
pub fn minimize<O: Objective + ?Sized>(
    f: &O,
    x0: DVector<f64>,
    s: &OptimSettings,
) -> Result<Minimum> {
    s.validate()?;
    let mut x = x0;
    let (mut fx, mut g) = f.eval(&x);
    if !is_finite(fx, &g) {
        return Err(Error::Numerical {
            iteration: 0,
            what: "objective or gradient not finite at the starting point".into(),
        });
    }
    let mut step = s.initial_step;
    for it in 0..s.max_iter {
        if g.amax() <= s.grad_tol {
            return Ok(Minimum {
                x,
                value: fx,
                iterations: it,
                converged: true,
            });
        }
        let (mut d, mut t) = match f.direction(&x, &g) {
            Some(d) => (d, s.initial_step),
            None => (g.clone(), step),
        };
        let mut slope = g.dot(&d);
        if !(slope > 0.0) {
            d = g.clone();
            slope = g.norm_squared();
            t = step;
        }
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial = &x - &d * t;
            let (ft, gt) = f.eval(&trial);
            if is_finite(ft, &gt) && ft <= fx - s.sufficient_decrease * t * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= s.backtrack_factor;
        }
        match accepted {
            Some((xn, fnew, gnew)) => {
                x = xn;
                fx = fnew;
                g = gnew;
                step = t / s.backtrack_factor;
            }
            None => {
                // No decrease representable in floating point: stationary up to rounding.
                let converged = g.amax() <= s.grad_tol;
                return Ok(Minimum {
                    x,
                    value: fx,
                    iterations: it,
                    converged,
                });
            }
        }
    }
    let converged = g.amax() <= s.grad_tol;
    Ok(Minimum {
        x,
        value: fx,
        iterations: s.max_iter,
        converged,
    })
}

fn project(x: &DVector<f64>, lower: &DVector<f64>, upper: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
}

fn projected_gradient_norm(
    x: &DVector<f64>,
    g: &DVector<f64>,
    lower: &DVector<f64>,
    upper: &DVector<f64>,
) -> f64 {
    (x - project(&(x - g), lower, upper)).amax()
}

/// Projected gradient descent on the box `lower <= x <= upper`, with Armijo
/// backtracking along the projection arc. Iterates stay inside the box exactly.
pub fn minimize_box<O: Objective + ?Sized>(
    f: &O,
    x0: DVector<f64>,
    lower: &DVector<f64>,
    upper: &DVector<f64>,
    s: &OptimSettings,
) -> Result<Minimum> {
    s.validate()?;
    let n = x0.len();
    if lower.len() != n || upper.len() != n {
        return Err(Error::Shape(format!(
            "bounds of length {}/{} for {} variables",
            lower.len(),
            upper.len(),
            n
        )));
    }
    for i in 0..n {
        if lower[i] > upper[i] {
            return Err(Error::InvalidArgument(format!(
                "lower bound {} exceeds upper bound {} at coordinate {i}",
                lower[i], upper[i]
            )));
        }
        if x0[i] < lower[i] || x0[i] > upper[i] {
            return Err(Error::InvalidArgument(format!(
                "starting point outside the box at coordinate {i}"
            )));
        }
    }
    let mut x = x0;
    let (mut fx, mut g) = f.eval(&x);
    if !is_finite(fx, &g) {
        return Err(Error::Numerical {
            iteration: 0,
            what: "objective or gradient not finite at the starting point".into(),
        });
    }
    let mut step = s.initial_step;
    for it in 0..s.max_iter {
        if projected_gradient_norm(&x, &g, lower, upper) <= s.grad_tol {
            return Ok(Minimum {
                x,
                value: fx,
                iterations: it,
                converged: true,
            });
        }
        let mut t = step;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial = project(&(&x - &g * t), lower, upper);
            let (ft, gt) = f.eval(&trial);
            let decrease = g.dot(&(&trial - &x));
            if is_finite(ft, &gt) && ft <= fx + s.sufficient_decrease * decrease {
                accepted = Some((trial, ft, gt));
                break;
            }
            t *= s.backtrack_factor;
        }
        match accepted {
            Some((xn, fnew, gnew)) => {
                x = xn;
                fx = fnew;
                g = gnew;
                step = t / s.backtrack_factor;
            }
            None => {
                let converged = projected_gradient_norm(&x, &g, lower, upper) <= s.grad_tol;
                return Ok(Minimum {
                    x,
                    value: fx,
                    iterations: it,
                    converged,
                });
            }
        }
    }
    let converged = projected_gradient_norm(&x, &g, lower, upper) <= s.grad_tol;
    Ok(Minimum {
        x,
        value: fx,
        iterations: s.max_iter,
        converged,
    })
}

/// Solve `A X = B` through an LU factorization with partial pivoting.
///
/// Reports singularity when the smallest pivot magnitude falls below
/// `n * eps` relative to the largest.
pub fn solve_linear(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Shape(format!(
            "system matrix is {}x{}, not square",
            n,
            a.ncols()
        )));
    }
    if b.nrows() != n {
        return Err(Error::Shape(format!(
            "right-hand side has {} rows for a {n}x{n} system",
            b.nrows()
        )));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, b.ncols()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            iteration: 0,
            what: "system matrix has non-finite entries".into(),
        });
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let pivots = u.diagonal().map(f64::abs);
    let (lo, hi) = (pivots.min(), pivots.max());
    if hi == 0.0 || lo <= hi * n as f64 * f64::EPSILON {
        return Err(Error::Singular(
            "add regularization (a positive lambda) to make the system solvable".into(),
        ));
    }
    lu.solve(b).ok_or_else(|| {
        Error::Singular("add regularization (a positive lambda) to make the system solvable".into())
    })
}

/// [`solve_linear`] with the closed-form solvers' jitter policy: on a singular
/// factorization add `1e-10 * trace(A) / n` to the diagonal and retry once.
pub fn solve_with_jitter(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match solve_linear(a, b) {
        Err(Error::Singular(msg)) => {
            let n = a.nrows();
            let jitter = 1e-10 * a.trace() / n as f64;
            if !(jitter > 0.0) {
                return Err(Error::Singular(msg));
            }
            let mut aj = a.clone();
            for i in 0..n {
                aj[(i, i)] += jitter;
            }
            solve_linear(&aj, b)
        }
        other => other,
    }
}

pub(crate) fn solve_vec(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let x = solve_with_jitter(a, &DMatrix::from_column_slice(b.len(), 1, b.as_slice()))?;
    Ok(x.column(0).into_owned())
}

/// Largest coordinate-wise discrepancy `|g - g_fd| / (1 + |g_fd|)` between the
/// analytic gradient and central differences with step `h`.
pub fn check_gradient<O: Objective + ?Sized>(f: &O, x: &DVector<f64>, h: f64) -> Result<f64> {
    let (fx, g) = f.eval(x);
    if !is_finite(fx, &g) {
        return Err(Error::Numerical {
            iteration: 0,
            what: "objective not finite at the checked point".into(),
        });
    }
    let mut worst = 0.0f64;
    let mut xp = x.clone();
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = f.eval(&xp).0;
        xp[i] = orig - h;
        let fm = f.eval(&xp).0;
        xp[i] = orig;
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::Numerical {
                iteration: i,
                what: "objective not finite within the differencing step".into(),
            });
        }
        let numeric = (fp - fm) / (2.0 * h);
        worst = worst.max((g[i] - numeric).abs() / (1.0 + numeric.abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sq_norm(x: &DVector<f64>) -> (f64, DVector<f64>) {
        (x.norm_squared(), x * 2.0)
    }

    #[test]
    fn minimize_sphere() {
        let r = minimize(&sq_norm, DVector::from_vec(vec![3.0, 4.0]), &Default::default()).unwrap();
        assert!(r.converged);
        assert!(r.x.amax() < 1e-6);
    }

    #[test]
    fn minimize_shifted_parabola() {
        let f = |x: &DVector<f64>| ((x[0] - 2.0).powi(2), DVector::from_element(1, 2.0 * (x[0] - 2.0)));
        let r = minimize(&f, DVector::zeros(1), &Default::default()).unwrap();
        assert_abs_diff_eq!(r.x[0], 2.0, epsilon = 1e-7);
        assert!(r.value < 1e-14);
    }

    #[test]
    fn minimize_rejects_nonfinite_start() {
        let f = |x: &DVector<f64>| (f64::NAN, x.clone());
        let err = minimize(&f, DVector::zeros(2), &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Numerical { iteration: 0, .. }));
    }

    #[test]
    fn box_active_and_interior() {
        let lo = DVector::zeros(1);
        let hi = DVector::from_element(1, 1.0);
        let f = |x: &DVector<f64>| ((x[0] - 2.0).powi(2), DVector::from_element(1, 2.0 * (x[0] - 2.0)));
        let r = minimize_box(&f, DVector::zeros(1), &lo, &hi, &Default::default()).unwrap();
        assert_eq!(r.x[0], 1.0);
        assert!(r.converged);
        let f = |x: &DVector<f64>| ((x[0] - 0.3).powi(2), DVector::from_element(1, 2.0 * (x[0] - 0.3)));
        let r = minimize_box(&f, DVector::zeros(1), &lo, &hi, &Default::default()).unwrap();
        assert_abs_diff_eq!(r.x[0], 0.3, epsilon = 1e-7);
    }

    #[test]
    fn box_argument_errors() {
        let f = sq_norm;
        let lo = DVector::from_element(1, 1.0);
        let hi = DVector::from_element(1, 0.0);
        assert!(matches!(
            minimize_box(&f, DVector::zeros(1), &lo, &hi, &Default::default()),
            Err(Error::InvalidArgument(_))
        ));
        let lo = DVector::zeros(1);
        let hi = DVector::from_element(1, 1.0);
        assert!(minimize_box(&f, DVector::from_element(1, 2.0), &lo, &hi, &Default::default()).is_err());
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = DMatrix::from_column_slice(3, 1, &[1.0, -2.0, 3.5]);
        assert_eq!(solve_linear(&DMatrix::identity(3, 3), &b).unwrap(), b);
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let x = solve_linear(&a, &DMatrix::from_column_slice(2, 1, &[2.0, 8.0])).unwrap();
        assert_abs_diff_eq!(x[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[(1, 0)], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn solve_singular() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::from_element(2, 1, 1.0);
        assert!(matches!(solve_linear(&a, &b), Err(Error::Singular(_))));
        assert!(matches!(solve_with_jitter(&a, &b), Err(Error::Singular(_))));
        let rank1 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(solve_linear(&rank1, &b).is_err());
        assert!(solve_with_jitter(&rank1, &b).is_ok());
    }

    #[test]
    fn gradient_check_on_quadratic() {
        let x = DVector::from_vec(vec![0.3, -1.7, 2.2]);
        assert!(check_gradient(&sq_norm, &x, 1e-6).unwrap() < 1e-6);
        let wrong = |x: &DVector<f64>| (x.norm_squared(), x * 3.0);
        assert!(check_gradient(&wrong, &x, 1e-6).unwrap() > 0.1);
    }
}
