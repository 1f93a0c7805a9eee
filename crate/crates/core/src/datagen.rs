//! Simulated two-class problems.
//!
//! All generators draw from ChaCha8 seeded with the given 64-bit seed, sample
//! sequentially (class A rows first, then class B) and are therefore
//! bit-for-bit reproducible. Normals come from `rand_distr::StandardNormal`.
//! Classes are named `"A"` and `"B"`, in that order.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{ClassOrder, Dataset};
use crate::error::{Error, Result};

/// Moon radius.
pub const MOON_RADIUS: f64 = 4.0;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for a stream identified by `path` (e.g. dataset and repeat
/// index) under `base`.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

fn classes() -> ClassOrder {
    ClassOrder::new("A", "B").expect("distinct names")
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn check_noise(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be a nonnegative finite number, got {sigma}"
        )));
    }
    Ok(())
}

fn check_count(n_per_class: usize) -> Result<()> {
    if n_per_class == 0 {
        return Err(Error::InvalidArgument("need at least one point per class".into()));
    }
    Ok(())
}

fn assemble(rows: Vec<[f64; 2]>, n_per_class: usize) -> Dataset {
    let x = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j]);
    let labels = (0..rows.len()).map(|i| Some(usize::from(i >= n_per_class))).collect();
    Dataset::new(x, labels, classes()).expect("generated data is valid")
}

/// Two Gaussian clusters centered at `-1_d` (class A) and `+1_d` (class B) with
/// covariance `variance * I`; class A gets the extra point when `n` is odd.
///
/// With `expected = true` the class is the cluster, so the Bayes boundary runs
/// through the low-density gap between the clusters.
///
/// With `expected = false` the feature distribution is the same equal mixture
/// of the two clusters, but the class is the side of the hyperplane
/// `v'x = 0` with `v = (e1 - e2)/sqrt(2)`, which is orthogonal to the cluster
/// axis and cuts through both clusters. Exact class counts come from drawing
/// the component along `v` as a signed half-normal. Needs `d >= 2`.
pub fn generate_two_class_gaussian(
    n: usize,
    d: usize,
    variance: f64,
    expected: bool,
    seed: u64,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if d < 1 || (!expected && d < 2) {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} too small (need d >= 1, or d >= 2 without the expected structure)"
        )));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let sd = variance.sqrt();
    let n_a = n.div_ceil(2);
    let mut rng = rng_from_seed(seed);
    let mut x = DMatrix::zeros(n, d);
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    for i in 0..n {
        let class_b = i >= n_a;
        let mut z: Vec<f64> = (0..d).map(|_| sd * normal(&mut rng)).collect();
        let center = if expected {
            if class_b {
                1.0
            } else {
                -1.0
            }
        } else {
            let k = if class_b { i - n_a } else { i };
            let center = if k % 2 == 0 { -1.0 } else { 1.0 };
            // replace the component along v by |.| with the class sign
            let along = (z[0] - z[1]) * inv_sqrt2;
            let target = if class_b { along.abs() } else { -along.abs() };
            let shift = (target - along) * inv_sqrt2;
            z[0] += shift;
            z[1] -= shift;
            center
        };
        for j in 0..d {
            x[(i, j)] = center + z[j];
        }
    }
    let labels = (0..n).map(|i| Some(usize::from(i >= n_a))).collect();
    Dataset::new(x, labels, classes())
}

/// Two interleaving half circles of radius 4: class A is
/// `(R cos t, R sin t)`, class B is `(R - R cos t, R/2 - R sin t)`, `t ~ U(0, pi)`,
/// each coordinate perturbed by `N(0, noise_sigma^2)`.
pub fn generate_crescent_moon(n_per_class: usize, noise_sigma: f64, seed: u64) -> Result<Dataset> {
    check_count(n_per_class)?;
    check_noise(noise_sigma)?;
    let r = MOON_RADIUS;
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(2 * n_per_class);
    for class_b in [false, true] {
        for _ in 0..n_per_class {
            let t = rng.random_range(0.0..PI);
            let (e1, e2) = (noise_sigma * normal(&mut rng), noise_sigma * normal(&mut rng));
            let p = if class_b {
                [r - r * t.cos(), r / 2.0 - r * t.sin()]
            } else {
                [r * t.cos(), r * t.sin()]
            };
            rows.push([p[0] + e1, p[1] + e2]);
        }
    }
    Ok(assemble(rows, n_per_class))
}

/// Two interleaved spirals: `r = 0.5 + 2t`, angle `2 pi turns t` (plus `pi` for
/// class B), `t ~ U(0, 1)`, plus isotropic `N(0, noise_sigma^2)` noise.
pub fn generate_spirals(n_per_class: usize, noise_sigma: f64, turns: f64, seed: u64) -> Result<Dataset> {
    check_count(n_per_class)?;
    check_noise(noise_sigma)?;
    if !(turns > 0.0 && turns.is_finite()) {
        return Err(Error::InvalidArgument(format!("turns must be positive, got {turns}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(2 * n_per_class);
    for offset in [0.0, PI] {
        for _ in 0..n_per_class {
            let t: f64 = rng.random();
            let (e1, e2) = (noise_sigma * normal(&mut rng), noise_sigma * normal(&mut rng));
            let (r, a) = (0.5 + 2.0 * t, 2.0 * PI * turns * t + offset);
            rows.push([r * a.cos() + e1, r * a.sin() + e2]);
        }
    }
    Ok(assemble(rows, n_per_class))
}

/// Two horizontal bands: `x1 ~ U(0, 2)`, `x2 = N(0, s^2)` for class A and
/// `1 + N(0, s^2)` for class B.
pub fn generate_parallel_planes(n_per_class: usize, noise_sigma: f64, seed: u64) -> Result<Dataset> {
    check_count(n_per_class)?;
    check_noise(noise_sigma)?;
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(2 * n_per_class);
    for level in [0.0, 1.0] {
        for _ in 0..n_per_class {
            let x1 = rng.random_range(0.0..2.0);
            rows.push([x1, level + noise_sigma * normal(&mut rng)]);
        }
    }
    Ok(assemble(rows, n_per_class))
}

/// Concentric circles of radius 1 (class A) and 2 (class B), angles uniform,
/// plus isotropic `N(0, noise_sigma^2)` noise.
pub fn generate_two_circles(n_per_class: usize, noise_sigma: f64, seed: u64) -> Result<Dataset> {
    check_count(n_per_class)?;
    check_noise(noise_sigma)?;
    let mut rng = rng_from_seed(seed);
    let mut rows = Vec::with_capacity(2 * n_per_class);
    for radius in [1.0, 2.0] {
        for _ in 0..n_per_class {
            let a = rng.random_range(0.0..2.0 * PI);
            let (e1, e2) = (noise_sigma * normal(&mut rng), noise_sigma * normal(&mut rng));
            rows.push([radius * a.cos() + e1, radius * a.sin() + e2]);
        }
    }
    Ok(assemble(rows, n_per_class))
}
