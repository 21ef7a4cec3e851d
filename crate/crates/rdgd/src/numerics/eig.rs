//! Extreme eigenvalues of symmetric matrices by shifted power iteration.

use super::matrix::Matrix;
use super::vec;
use crate::error::{Error, Result};

const MAX_ITERS: usize = 100_000;

/// Largest-magnitude eigenvalue of a symmetric matrix, by power iteration
/// from the normalized all-ones vector. Returns the Rayleigh quotient once
/// its change per iteration drops below `tol` (relative).
fn dominant_eigenvalue(a: &Matrix, tol: f64) -> Result<f64> {
    let p = a.rows();
    assert_eq!(p, a.cols(), "matrix must be square");
    let mut v = vec![1.0 / (p as f64).sqrt(); p];
    let mut lambda = 0.0f64;
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let mut av = a.matvec(&v);
        let norm = vec::norm2(&av);
        if norm == 0.0 {
            // v is in the null space and the start vector was not rotated
            // away from it, so the dominant eigenvalue along this orbit is 0.
            return Ok(0.0);
        }
        let rayleigh = vec::dot(&v, &av);
        vec::scale(&mut av, 1.0 / norm);
        v = av;
        delta = (rayleigh - lambda).abs();
        lambda = rayleigh;
        if delta <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            return Ok(lambda);
        }
    }
    Err(Error::EigenNonConvergence { max_iters: MAX_ITERS, delta })
}

/// Gershgorin bound on the spectral radius: max row sum of |a_ij|.
fn gershgorin_radius(a: &Matrix) -> f64 {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// lambda_max of a symmetric matrix within relative tolerance `tol`.
///
/// The matrix is shifted by its Gershgorin radius first so the dominant
/// eigenvalue of the shifted matrix is exactly lambda_max + shift; this makes
/// the routine insensitive to the sign pattern of the spectrum.
pub fn max_eigenvalue(a: &Matrix, tol: f64) -> Result<f64> {
    let s = gershgorin_radius(a);
    let shifted = a.plus_scaled_identity(s);
    Ok(dominant_eigenvalue(&shifted, tol)? - s)
}

/// lambda_min of a symmetric matrix within relative tolerance `tol`,
/// via the reflection lambda_min(A) = s - lambda_max(s*I - A) with
/// s = lambda_max(A).
pub fn min_eigenvalue(a: &Matrix, tol: f64) -> Result<f64> {
    let s = max_eigenvalue(a, tol)?;
    let mut reflected = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            reflected.set(i, j, if i == j { s - a.get(i, j) } else { -a.get(i, j) });
        }
    }
    Ok(s - max_eigenvalue(&reflected, tol)?)
}
