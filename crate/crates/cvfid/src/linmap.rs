//! Real linear maps acting jointly on quantum and classical variables.

use crate::error::{CvfidError, Result};
use crate::labels::{PairRole, VariableLabel};
use nalgebra::DMatrix;

/// Tolerance for the symplectic-form preservation check on physical maps.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// A real square matrix over an ordered variable list. Maps flagged as
/// physical are unitary on the quantum variables: they preserve the
/// degenerate symplectic form (zero on classical rows and columns).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: DMatrix<f64>,
    pub description: String,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>, description: impl Into<String>) -> Self {
        LinearMap {
            matrix,
            description: description.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap::new(DMatrix::identity(dim, dim), "identity")
    }

    /// Constructs a map that must be physical for the given variables;
    /// rejects matrices that fail the symplectic check.
    pub fn physical(
        matrix: DMatrix<f64>,
        labels: &[VariableLabel],
        description: impl Into<String>,
    ) -> Result<Self> {
        let map = LinearMap::new(matrix, description);
        let defect = map.symplectic_defect(labels)?;
        if defect > SYMPLECTIC_TOL {
            return Err(CvfidError::NotSymplectic { defect });
        }
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(CvfidError::SingularMap)?;
        Ok(LinearMap::new(inv, format!("inverse of {}", self.description)))
    }

    /// Max-norm of `S Omega S^T - Omega`, with `Omega` the degenerate
    /// symplectic form of the quantum pairs in `labels`.
    pub fn symplectic_defect(&self, labels: &[VariableLabel]) -> Result<f64> {
        if labels.len() != self.dim() {
            return Err(CvfidError::DimensionMismatch {
                expected: self.dim(),
                got: labels.len(),
            });
        }
        let omega = symplectic_form(labels);
        let defect = &self.matrix * &omega * self.matrix.transpose() - &omega;
        Ok(defect.abs().max())
    }
}

/// The degenerate symplectic form: `Omega[x_i, p_i] = 1` for each quantum
/// pair, antisymmetric, and zero on classical rows/columns.
pub fn symplectic_form(labels: &[VariableLabel]) -> DMatrix<f64> {
    let n = labels.len();
    let mut omega = DMatrix::zeros(n, n);
    for (i, a) in labels.iter().enumerate() {
        if !a.is_quantum() || a.role != PairRole::PositionLike {
            continue;
        }
        for (j, b) in labels.iter().enumerate() {
            if b.is_quantum()
                && b.pair_index == a.pair_index
                && b.role == PairRole::MomentumLike
            {
                omega[(i, j)] = 1.0;
                omega[(j, i)] = -1.0;
            }
        }
    }
    omega
}

/// Builders for the maps used by the protocol pipelines. Each acts on a
/// specific ordered variable list documented on the function.
pub mod maps {
    use super::*;

    /// Displacement of a quantum pair by a classical pair:
    /// `x_q -> x_q + x_c`, `p_q -> p_q + p_c`, identity on the classical
    /// variables. Indices select the four rows in the target variable list.
    pub fn displace_by_classical(
        dim: usize,
        xq: usize,
        pq: usize,
        xc: usize,
        pc: usize,
    ) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        m[(xq, xc)] = 1.0;
        m[(pq, pc)] = 1.0;
        m
    }

    /// Inverse of [`displace_by_classical`].
    pub fn undisplace_by_classical(
        dim: usize,
        xq: usize,
        pq: usize,
        xc: usize,
        pc: usize,
    ) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        m[(xq, xc)] = -1.0;
        m[(pq, pc)] = -1.0;
        m
    }

    /// 50/50 basis change of two quantum modes to their sum/difference
    /// quadratures: `x_+ = (x_a + x_b)/sqrt(2)`, `p_+ = (p_a + p_b)/sqrt(2)`,
    /// `x_- = (x_a - x_b)/sqrt(2)`, `p_- = (p_a - p_b)/sqrt(2)`.
    /// Rows (xp, pp, xm, pm) are written over columns (xa, pa, xb, pb).
    pub fn plus_minus_basis(
        dim: usize,
        rows: [usize; 4],
        mode_a: [usize; 2],
        mode_b: [usize; 2],
    ) -> DMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::identity(dim, dim);
        for &r in &rows {
            for c in 0..dim {
                m[(r, c)] = 0.0;
            }
        }
        let [xp, pp, xm, pm] = rows;
        let [xa, pa] = mode_a;
        let [xb, pb] = mode_b;
        m[(xp, xa)] = s;
        m[(xp, xb)] = s;
        m[(pp, pa)] = s;
        m[(pp, pb)] = s;
        m[(xm, xa)] = s;
        m[(xm, xb)] = -s;
        m[(pm, pa)] = s;
        m[(pm, pb)] = -s;
        m
    }

    /// QND interaction of strength `kappa`:
    /// `x_a -> x_a + kappa p_b`, `x_b -> x_b + kappa p_a`.
    pub fn qnd_interaction(dim: usize, xa: usize, pa: usize, xb: usize, pb: usize, kappa: f64) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        m[(xa, pb)] = kappa;
        m[(xb, pa)] = kappa;
        m
    }

    /// Feedback displacement proportional to to-be-measured variables:
    /// each `(target, source, gain)` adds `gain * source` to `target`.
    pub fn feedback(dim: usize, terms: &[(usize, usize, f64)]) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        for &(target, source, gain) in terms {
            m[(target, source)] += gain;
        }
        m
    }
}
