//! Moore-Penrose pseudoinverse of symmetric matrices via eigendecomposition.

use crate::error::{CvfidError, Result};
use nalgebra::DMatrix;

/// Relative eigenvalue cutoff: eigenvalues below `REL_TOL * max|eig|` are
/// treated as exact zeros. Protocol matrices are well conditioned; the cutoff
/// only guards the rows zeroed out by measurement projectors.
pub const REL_TOL: f64 = 1e-12;

/// Pseudoinverse of a symmetric matrix. The zero matrix maps to the zero
/// matrix; an invertible matrix maps to its ordinary inverse.
pub fn pseudo_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(CvfidError::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    let max_asymmetry = (m - m.transpose()).abs().max();
    if max_asymmetry > 1e-9 * m.abs().max().max(1.0) {
        return Err(CvfidError::NotSymmetric { max_asymmetry });
    }
    let sym = (m + m.transpose()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let cutoff = REL_TOL * max_abs;
    let inv_eigs = eig
        .eigenvalues
        .map(|v| if v.abs() <= cutoff { 0.0 } else { 1.0 / v });
    let mut out = DMatrix::zeros(n, n);
    for (i, lam) in inv_eigs.iter().enumerate() {
        if *lam != 0.0 {
            let col = eig.eigenvectors.column(i).clone_owned();
            out += (&col * col.transpose()).scale(*lam);
        }
    }
    // Reconstruction is symmetric up to rounding; enforce it exactly.
    let out = (&out + out.transpose()).scale(0.5);
    Ok(out)
}
