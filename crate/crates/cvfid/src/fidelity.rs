//! Gaussian fidelity overlaps.
//!
//! For a single-mode Gaussian state with covariance `gamma` and mean `m`, the
//! Wigner function is `W = 1/(pi sqrt(det gamma)) exp(-(chi-m)^T gamma^{-1}
//! (chi-m))`, and the overlap fidelity with another Gaussian is `2 pi
//! integral(W_1 W_2)`.

use crate::error::{CvfidError, Result};
use nalgebra::{DMatrix, DVector};

fn check_2x2_pd(gamma: &DMatrix<f64>) -> Result<()> {
    if gamma.nrows() != 2 || gamma.ncols() != 2 {
        return Err(CvfidError::DimensionMismatch {
            expected: 2,
            got: gamma.nrows(),
        });
    }
    if gamma[(0, 0)] <= 0.0 || gamma.determinant() <= 0.0 {
        return Err(CvfidError::NotPositiveDefinite);
    }
    Ok(())
}

/// Overlap fidelity of the state with covariance `gamma_out` (zero mean)
/// against the vacuum: `2 sqrt(det gamma_res / det gamma_out)` with
/// `gamma_res = (gamma_out^{-1} + I)^{-1}`, which simplifies to
/// `2 / sqrt(det(gamma_out + I))`. Equals 1 iff `gamma_out` is the identity.
pub fn fidelity_vs_vacuum(gamma_out: &DMatrix<f64>) -> Result<f64> {
    check_2x2_pd(gamma_out)?;
    let sum = gamma_out + DMatrix::<f64>::identity(2, 2);
    Ok(2.0 / sum.determinant().sqrt())
}

/// Overlap fidelity of the Gaussian `(gamma, mean offset dm)` against the
/// coherent state sitting at the offset origin:
/// `2 / sqrt(det(gamma + I)) * exp(-dm^T (gamma + I)^{-1} dm)`.
/// Reduces to [`fidelity_vs_vacuum`] at `dm = 0`.
pub fn fidelity_vs_coherent(gamma: &DMatrix<f64>, dm: &DVector<f64>) -> Result<f64> {
    check_2x2_pd(gamma)?;
    if dm.len() != 2 {
        return Err(CvfidError::DimensionMismatch {
            expected: 2,
            got: dm.len(),
        });
    }
    let sum = gamma + DMatrix::<f64>::identity(2, 2);
    let inv = sum
        .clone()
        .try_inverse()
        .ok_or(CvfidError::NotPositiveDefinite)?;
    let quad = (dm.transpose() * inv * dm)[(0, 0)];
    Ok(2.0 / sum.determinant().sqrt() * (-quad).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Grid oracle: 2 pi integral of the product of two Gaussian Wigner
    /// functions by direct quadrature.
    fn wigner_overlap_on_grid(
        g1: &DMatrix<f64>,
        m1: &DVector<f64>,
        g2: &DMatrix<f64>,
        m2: &DVector<f64>,
    ) -> f64 {
        let w = |g: &DMatrix<f64>, m: &DVector<f64>, x: f64, p: f64| {
            let inv = g.clone().try_inverse().unwrap();
            let d = DVector::from_vec(vec![x - m[0], p - m[1]]);
            let q = (d.transpose() * inv * d)[(0, 0)];
            (-q).exp() / (std::f64::consts::PI * g.determinant().sqrt())
        };
        let (lo, hi, step) = (-8.0_f64, 8.0_f64, 0.02_f64);
        let n = ((hi - lo) / step).round() as usize;
        let mut sum = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let x = lo + i as f64 * step;
                let p = lo + j as f64 * step;
                sum += w(g1, m1, x, p) * w(g2, m2, x, p);
            }
        }
        2.0 * std::f64::consts::PI * sum * step * step
    }

    #[test]
    fn identity_gives_unity() {
        let id = DMatrix::identity(2, 2);
        assert_abs_diff_eq!(fidelity_vs_vacuum(&id).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn doubled_covariance() {
        let g = DMatrix::identity(2, 2).scale(2.0);
        assert_abs_diff_eq!(fidelity_vs_vacuum(&g).unwrap(), 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_closed_form_matches_grid_oracle() {
        for (a, b) in [(1.5, 0.8), (3.0, 3.0), (0.6, 2.4)] {
            let g = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b]));
            let closed = fidelity_vs_vacuum(&g).unwrap();
            assert_abs_diff_eq!(closed, 2.0 / ((a + 1.0) * (b + 1.0)).sqrt(), epsilon = 1e-14);
            let grid = wigner_overlap_on_grid(
                &g,
                &DVector::zeros(2),
                &DMatrix::identity(2, 2),
                &DVector::zeros(2),
            );
            assert_abs_diff_eq!(closed, grid, epsilon = 1e-7);
        }
    }

    #[test]
    fn coherent_offset_reduces_overlap() {
        let id = DMatrix::identity(2, 2);
        for d in [0.5, 1.0, 2.0] {
            let dm = DVector::from_vec(vec![d, 0.0]);
            let f = fidelity_vs_coherent(&id, &dm).unwrap();
            assert_abs_diff_eq!(f, (-d * d / 2.0).exp(), epsilon = 1e-14);
            let grid = wigner_overlap_on_grid(&id, &dm, &id, &DVector::zeros(2));
            assert_abs_diff_eq!(f, grid, epsilon = 1e-7);
        }
    }

    #[test]
    fn coherent_at_zero_offset_matches_vacuum_form() {
        let g = DMatrix::from_row_slice(2, 2, &[1.7, 0.2, 0.2, 0.9]);
        let dm = DVector::zeros(2);
        assert_abs_diff_eq!(
            fidelity_vs_coherent(&g, &dm).unwrap(),
            fidelity_vs_vacuum(&g).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn non_positive_definite_rejected() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(fidelity_vs_vacuum(&g).is_err());
        let g = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(fidelity_vs_vacuum(&g).is_err());
    }
}
