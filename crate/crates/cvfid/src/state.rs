//! Gaussian states over mixed quantum/classical variables.
//!
//! Convention: the covariance matrix is `gamma_ij = 2 Re<(y_i - <y_i>)(y_j -
//! <y_j>)>`, so the vacuum state has covariance equal to the identity and a
//! classical pair of variance parameter `v_c` has covariance `v_c * I`
//! (`v_c = 2 Var(x_cl)`). All quadratures are dimensionless.

use crate::error::{CvfidError, Result};
use crate::labels::{self, pair, VariableKind, VariableLabel};
use crate::linmap::{symplectic_form, LinearMap};
use nalgebra::{DMatrix, DVector};

/// Tolerance on covariance symmetry before symmetrization.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lower bound on covariance eigenvalues.
pub const PSD_TOL: f64 = -1e-10;

/// Labeled mean vector and covariance matrix over quantum and classical
/// variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    labels: Vec<VariableLabel>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, symmetrizing the covariance and validating labels,
    /// symmetry and positive semidefiniteness. Violations of the quantum
    /// uncertainty bound `cov + i Omega >= 0` are only warned about: hybrid
    /// states with classical variables legitimately evade per-variable
    /// uncertainty limits.
    pub fn new(labels: Vec<VariableLabel>, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        labels::validate_labels(&labels)?;
        let n = labels.len();
        if mean.len() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: mean.len(),
            });
        }
        if cov.nrows() != n || cov.ncols() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: cov.nrows(),
            });
        }
        let max_asymmetry = (&cov - cov.transpose()).abs().max();
        let scale = cov.abs().max().max(1.0);
        if max_asymmetry > SYMMETRY_TOL * scale {
            return Err(CvfidError::NotSymmetric { max_asymmetry });
        }
        let cov = (&cov + cov.transpose()).scale(0.5);
        let min_eigenvalue = cov
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .min();
        if min_eigenvalue < PSD_TOL * scale {
            return Err(CvfidError::NotPositiveSemidefinite { min_eigenvalue });
        }
        let state = GaussianState { labels, mean, cov };
        let defect = state.quantum_physicality_defect();
        if defect > 1e-8 {
            log::warn!(
                "state violates the quantum uncertainty bound: min eig(cov + i Omega) = {:.3e}",
                -defect
            );
        }
        Ok(state)
    }

    /// Zero-mean product of `quantum_pairs` vacua and one classical pair of
    /// variance parameter `v_c`: covariance `diag(1, ..., 1, v_c, v_c)`.
    pub fn vacuum_plus_classical(quantum_pairs: usize, v_c: f64) -> Result<Self> {
        if !(v_c >= 0.0) {
            return Err(CvfidError::invalid_parameter(
                "v_c",
                format!("classical variance must be >= 0, got {v_c}"),
            ));
        }
        let mut labels = Vec::with_capacity(2 * quantum_pairs + 2);
        for i in 0..quantum_pairs {
            let (xn, pn) = if quantum_pairs == 1 {
                ("x".to_string(), "p".to_string())
            } else {
                (format!("x_{}", i + 1), format!("p_{}", i + 1))
            };
            labels.extend(pair(xn, pn, VariableKind::Quantum, i));
        }
        labels.extend(pair("x_cl", "p_cl", VariableKind::Classical, quantum_pairs));
        let n = labels.len();
        let mut cov = DMatrix::identity(n, n);
        cov[(n - 2, n - 2)] = v_c;
        cov[(n - 1, n - 1)] = v_c;
        GaussianState::new(labels, DVector::zeros(n), cov)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VariableLabel] {
        &self.labels
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        labels::index_of(&self.labels, name)
    }

    /// Mean of the named variable.
    pub fn mean_of(&self, name: &str) -> Result<f64> {
        Ok(self.mean[self.index_of(name)?])
    }

    /// Covariance entry for a pair of named variables.
    pub fn cov_of(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cov[(self.index_of(a)?, self.index_of(b)?)])
    }

    /// Applies a linear map: `cov -> S cov S^T`, `mean -> S mean`.
    pub fn apply_map(&self, map: &LinearMap) -> Result<GaussianState> {
        if map.dim() != self.dim() {
            return Err(CvfidError::DimensionMismatch {
                expected: self.dim(),
                got: map.dim(),
            });
        }
        let cov = &map.matrix * &self.cov * map.matrix.transpose();
        let mean = &map.matrix * &self.mean;
        GaussianState::new(self.labels.clone(), mean, cov)
    }

    /// Restriction of mean and covariance to the named variables; for
    /// Gaussian states marginalization over the dropped variables is exactly
    /// this restriction. Classical variables may be kept or dropped freely;
    /// a kept quantum variable keeps its conjugate requirement, so `keep`
    /// must contain complete quantum pairs.
    pub fn marginal(&self, keep: &[&str]) -> Result<GaussianState> {
        if keep.is_empty() {
            return Err(CvfidError::invalid_parameter("keep", "must be non-empty"));
        }
        let mut idx = Vec::with_capacity(keep.len());
        for name in keep {
            idx.push(self.index_of(name)?);
        }
        let labels: Vec<_> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        GaussianState::new(labels, mean, cov)
    }

    /// Renames variables in place (e.g. after a basis change); the list must
    /// match the current dimension and pair structure is revalidated.
    pub fn with_labels(&self, labels: Vec<VariableLabel>) -> Result<GaussianState> {
        GaussianState::new(labels, self.mean.clone(), self.cov.clone())
    }

    /// Adds `shift` to the mean vector.
    pub fn displace(&self, shift: &DVector<f64>) -> Result<GaussianState> {
        if shift.len() != self.dim() {
            return Err(CvfidError::DimensionMismatch {
                expected: self.dim(),
                got: shift.len(),
            });
        }
        GaussianState::new(self.labels.clone(), &self.mean + shift, self.cov.clone())
    }

    /// How far `cov + i Omega` is from positive semidefinite on the quantum
    /// block: returns `max(0, -min_eig)`. Uses the real embedding
    /// `[[cov, Omega], [-Omega, cov]]`, whose spectrum doubles the Hermitian
    /// one.
    pub fn quantum_physicality_defect(&self) -> f64 {
        let q: Vec<usize> = (0..self.dim())
            .filter(|&i| self.labels[i].is_quantum())
            .collect();
        if q.is_empty() {
            return 0.0;
        }
        let m = q.len();
        let qlabels: Vec<_> = q.iter().map(|&i| self.labels[i].clone()).collect();
        let cov_q = DMatrix::from_fn(m, m, |r, c| self.cov[(q[r], q[c])]);
        let omega = symplectic_form(&qlabels);
        // Hermitian H = cov + i*Omega -> real symmetric embedding.
        let mut embed = DMatrix::zeros(2 * m, 2 * m);
        embed.view_mut((0, 0), (m, m)).copy_from(&cov_q);
        embed.view_mut((m, m), (m, m)).copy_from(&cov_q);
        // imaginary part B = Omega enters as [[A, -B], [B, A]]
        embed.view_mut((0, m), (m, m)).copy_from(&(-&omega));
        embed.view_mut((m, 0), (m, m)).copy_from(&omega);
        let min = embed.symmetric_eigen().eigenvalues.min();
        (-min).max(0.0)
    }
}
