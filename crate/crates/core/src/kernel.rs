//! Kernels and Gram matrices.
//!
//! The RBF kernel is parameterized as `k(x, z) = exp(-sigma * ||x - z||^2)`,
//! i.e. `sigma` multiplies the squared distance directly (the kernlab `rbfdot`
//! convention), so `sigma = 0.05` is a wide kernel.

use nalgebra::{DMatrix, DVectorView};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { sigma: f64 },
}

impl Kernel {
    pub fn rbf(sigma: f64) -> Result<Self> {
        let k = Kernel::Rbf { sigma };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rbf { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::InvalidArgument(format!("rbf sigma must be positive, got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: DVectorView<f64>, z: DVectorView<f64>) -> f64 {
        match *self {
            Kernel::Linear => x.dot(&z),
            Kernel::Rbf { sigma } => (-sigma * (x - z).norm_squared()).exp(),
        }
    }
}

/// `K[i, j] = k(a_i, b_j)` over the rows of `a` and `b`.
pub fn gram_matrix(kernel: &Kernel, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    kernel.validate()?;
    if a.ncols() != b.ncols() && a.nrows() > 0 && b.nrows() > 0 {
        return Err(Error::Shape(format!(
            "kernel inputs have {} and {} columns",
            a.ncols(),
            b.ncols()
        )));
    }
    let (m, p) = (a.nrows(), b.nrows());
    let out = match *kernel {
        Kernel::Linear => a * b.transpose(),
        Kernel::Rbf { sigma } => {
            let a_sq: Vec<f64> = a.row_iter().map(|r| r.norm_squared()).collect();
            let b_sq: Vec<f64> = b.row_iter().map(|r| r.norm_squared()).collect();
            let cross = a * b.transpose();
            DMatrix::from_fn(m, p, |i, j| {
                let d2 = (a_sq[i] + b_sq[j] - 2.0 * cross[(i, j)]).max(0.0);
                (-sigma * d2).exp()
            })
        }
    };
    Ok(out)
}

/// Gram matrix of a point set with itself, symmetrized exactly.
pub fn gram_self(kernel: &Kernel, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut k = gram_matrix(kernel, a, a)?;
    let n = k.nrows();
    for i in 0..n {
        if let Kernel::Rbf { .. } = kernel {
            k[(i, i)] = 1.0;
        }
        for j in (i + 1)..n {
            let v = 0.5 * (k[(i, j)] + k[(j, i)]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rbf_identical_points_give_one() {
        let a = DMatrix::from_row_slice(1, 2, &[0.3, -1.2]);
        let k = gram_matrix(&Kernel::Rbf { sigma: 0.05 }, &a, &a).unwrap();
        assert_abs_diff_eq!(k[(0, 0)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rbf_unit_distance() {
        let a = DMatrix::from_row_slice(1, 2, &[0.0, 0.0]);
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let k = gram_matrix(&Kernel::Rbf { sigma: 0.05 }, &a, &b).unwrap();
        assert_abs_diff_eq!(k[(0, 0)], (-0.05f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(k[(0, 0)], 0.951229, epsilon = 1e-6);
    }

    #[test]
    fn linear_is_dot_product() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        assert_eq!(gram_matrix(&Kernel::Linear, &a, &b).unwrap()[(0, 0)], 11.0);
    }

    #[test]
    fn shape_and_parameter_errors() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::zeros(2, 3);
        assert!(matches!(
            gram_matrix(&Kernel::Linear, &a, &b),
            Err(Error::Shape(_))
        ));
        assert!(Kernel::rbf(0.0).is_err());
        assert!(gram_matrix(&Kernel::Rbf { sigma: -1.0 }, &a, &a).is_err());
    }
}
