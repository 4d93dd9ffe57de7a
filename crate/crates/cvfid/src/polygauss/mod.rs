//! Exact calculus for Wigner functions of the form
//! `P(v) * exp(-v^T M v + b^T v + c)` with `P` a sparse multivariate
//! polynomial.
//!
//! This family is closed under products, invertible linear substitutions,
//! partial evaluation and Gaussian integration, which is everything a
//! teleportation pipeline needs: beam-splitter basis changes and feedback are
//! substitutions, homodyne detection is evaluation, and averaging over
//! outcomes or tracing out modes is integration. Integration reduces one
//! variable at a time with
//! `I_n(beta) = integral(t^n exp(-a t^2 + beta t) dt)`, `I_0 =
//! sqrt(pi/a) exp(beta^2/(4a))` and `I_n = d/d(beta) I_{n-1}`, where `beta`
//! stays affine in the remaining variables, so the poly-Gauss form survives.

use crate::error::{CvfidError, Result};
use crate::labels::VariableLabel;
use crate::linmap::LinearMap;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

mod poly;
use poly::Poly;

pub mod fock;
pub use fock::{
    displaced_fock_teleport_fidelity, fock_ensemble_closed_form, fock_ensemble_fidelity,
    fock_teleport_fidelity, fock_unit_gain_fidelity, fock_unit_gain_fidelity_symbolic,
    fock_wigner, EnsembleSum,
};

/// Relative pruning threshold for polynomial coefficients.
const PRUNE_REL: f64 = 1e-14;

/// `P(v) * exp(-v^T M v + b^T v + c)` over an ordered list of labeled
/// variables. `M` is kept symmetric; the polynomial never stores explicit
/// zeros (coefficients below `1e-14 * max|coeff|` are pruned).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGaussWigner {
    labels: Vec<VariableLabel>,
    poly: Poly,
    quad: DMatrix<f64>,
    lin: DVector<f64>,
    constant: f64,
}

impl PolyGaussWigner {
    /// Builds a poly-Gauss function from raw parts.
    pub fn from_parts(
        labels: Vec<VariableLabel>,
        poly: BTreeMap<Vec<u32>, f64>,
        quad: DMatrix<f64>,
        lin: DVector<f64>,
        constant: f64,
    ) -> Result<Self> {
        let n = labels.len();
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[..i] {
                if a.name == b.name {
                    return Err(CvfidError::DuplicateLabel(a.name.clone()));
                }
            }
        }
        if quad.nrows() != n || quad.ncols() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: quad.nrows(),
            });
        }
        if lin.len() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: lin.len(),
            });
        }
        let max_asymmetry = (&quad - quad.transpose()).abs().max();
        if max_asymmetry > 1e-9 * quad.abs().max().max(1.0) {
            return Err(CvfidError::NotSymmetric { max_asymmetry });
        }
        let quad = (&quad + quad.transpose()).scale(0.5);
        for key in poly.keys() {
            if key.len() != n {
                return Err(CvfidError::DimensionMismatch {
                    expected: n,
                    got: key.len(),
                });
            }
        }
        let mut poly = Poly::from_map(poly);
        poly.prune(PRUNE_REL);
        Ok(PolyGaussWigner {
            labels,
            poly,
            quad,
            lin,
            constant,
        })
    }

    /// Normalized Gaussian density with mean `m` and covariance `gamma` in
    /// the Wigner convention: `1/(pi^{d/2} sqrt(det gamma)) exp(-(v-m)^T
    /// gamma^{-1} (v-m))`, which for a single quantum pair is the Gaussian
    /// Wigner function.
    pub fn gaussian(labels: Vec<VariableLabel>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if mean.len() != n || cov.nrows() != n || cov.ncols() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: mean.len(),
            });
        }
        let det = cov.determinant();
        if det <= 0.0 {
            return Err(CvfidError::NotPositiveDefinite);
        }
        let inv = cov.clone().try_inverse().ok_or(CvfidError::NotPositiveDefinite)?;
        let norm = 1.0 / (std::f64::consts::PI.powf(n as f64 / 2.0) * det.sqrt());
        let lin = (&inv * mean).scale(2.0);
        let constant = -(mean.transpose() * &inv * mean)[(0, 0)];
        let mut poly = BTreeMap::new();
        poly.insert(vec![0u32; n], norm);
        PolyGaussWigner::from_parts(labels, poly, inv, lin, constant)
    }

    /// The constant function 1 over the given variables (`M = 0`); useful as
    /// a neutral factor when embedding kernels into larger variable sets.
    pub fn unit(labels: Vec<VariableLabel>) -> Result<Self> {
        let n = labels.len();
        let mut poly = BTreeMap::new();
        poly.insert(vec![0u32; n], 1.0);
        PolyGaussWigner::from_parts(labels, poly, DMatrix::zeros(n, n), DVector::zeros(n), 0.0)
    }

    pub fn labels(&self) -> &[VariableLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Number of stored polynomial terms.
    pub fn term_count(&self) -> usize {
        self.poly.len()
    }

    /// Coefficient of the monomial with the given exponents (zero if absent).
    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.poly.get(exponents)
    }

    /// The polynomial as an exponent-to-coefficient map.
    pub fn terms(&self) -> std::collections::BTreeMap<Vec<u32>, f64> {
        self.poly.to_map()
    }

    pub fn quad(&self) -> &DMatrix<f64> {
        &self.quad
    }

    pub fn lin(&self) -> &DVector<f64> {
        &self.lin
    }

    pub fn log_prefactor(&self) -> f64 {
        self.constant
    }

    /// Replaces the labels (dimension and uniqueness are revalidated).
    pub fn with_labels(&self, labels: Vec<VariableLabel>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(CvfidError::DimensionMismatch {
                expected: self.dim(),
                got: labels.len(),
            });
        }
        PolyGaussWigner::from_parts(
            labels,
            self.poly.to_map(),
            self.quad.clone(),
            self.lin.clone(),
            self.constant,
        )
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| CvfidError::UnknownLabel(name.to_string()))
    }

    /// Pointwise evaluation (used by the quadrature cross-checks).
    pub fn eval(&self, point: &DVector<f64>) -> f64 {
        assert_eq!(point.len(), self.dim());
        let quad_form = (point.transpose() * &self.quad * point)[(0, 0)];
        let exponent = -quad_form + self.lin.dot(point) + self.constant;
        self.poly.eval(point) * exponent.exp()
    }

    /// Product of two poly-Gauss functions. Shared variables are identified
    /// by name (kinds must agree); the result ranges over the union of the
    /// two label lists, in `self`-then-`other` order.
    pub fn product(&self, other: &PolyGaussWigner) -> Result<PolyGaussWigner> {
        let mut labels = self.labels.clone();
        // map from other's index to union index
        let mut other_pos = Vec::with_capacity(other.dim());
        for l in &other.labels {
            match labels.iter().position(|m| m.name == l.name) {
                Some(i) => {
                    if labels[i].kind != l.kind {
                        return Err(CvfidError::LabelConflict(format!(
                            "variable `{}` is quantum in one factor and classical in the other",
                            l.name
                        )));
                    }
                    other_pos.push(i);
                }
                None => {
                    labels.push(l.clone());
                    other_pos.push(labels.len() - 1);
                }
            }
        }
        let n = labels.len();
        let expand_self = |m: &DMatrix<f64>, b: &DVector<f64>| {
            let mut quad = DMatrix::zeros(n, n);
            quad.view_mut((0, 0), (self.dim(), self.dim())).copy_from(m);
            let mut lin = DVector::zeros(n);
            lin.rows_mut(0, self.dim()).copy_from(b);
            (quad, lin)
        };
        let (mut quad, mut lin) = expand_self(&self.quad, &self.lin);
        for r in 0..other.dim() {
            lin[other_pos[r]] += other.lin[r];
            for c in 0..other.dim() {
                quad[(other_pos[r], other_pos[c])] += other.quad[(r, c)];
            }
        }
        let poly = Poly::product_embedded(&self.poly, self.dim(), &other.poly, &other_pos, n);
        PolyGaussWigner::from_parts(labels, poly.to_map(), quad, lin, self.constant + other.constant)
    }

    /// Applies the linear dynamics `v -> S v`: the new function is
    /// `W'(v) = W(S^{-1} v) |det S^{-1}|`, so that the total integral is
    /// preserved. `M -> S^{-T} M S^{-1}`, `b -> S^{-T} b`, and the polynomial
    /// exponents are recomposed through the rows of `S^{-1}`.
    pub fn substitute_linear(&self, map: &LinearMap) -> Result<PolyGaussWigner> {
        let n = self.dim();
        if map.dim() != n {
            return Err(CvfidError::DimensionMismatch {
                expected: n,
                got: map.dim(),
            });
        }
        let det = map.matrix.determinant();
        if det.abs() < 1e-300 {
            return Err(CvfidError::SingularMap);
        }
        let inv = map
            .matrix
            .clone()
            .try_inverse()
            .ok_or(CvfidError::SingularMap)?;
        let quad = inv.transpose() * &self.quad * &inv;
        let lin = inv.transpose() * &self.lin;
        let poly = self.poly.substitute_rows(&inv).scaled(1.0 / det.abs());
        PolyGaussWigner::from_parts(self.labels.clone(), poly.to_map(), quad, lin, self.constant)
    }

    /// Integrates out the named variables exactly. Variables are processed
    /// greedily by the largest diagonal entry of `M`; the result does not
    /// depend on the order. Fails if some requested direction has a
    /// non-positive quadratic coefficient.
    pub fn integrate_out<S: AsRef<str>>(&self, names: &[S]) -> Result<PolyGaussWigner> {
        let mut current = self.clone();
        let mut remaining: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        while !remaining.is_empty() {
            // greedy: largest diagonal first to limit fill-in
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    let idx = current.index_of(name)?;
                    Ok((i, current.quad[(idx, idx)]))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            let name = remaining.swap_remove(pos);
            current = current.integrate_single(&name)?;
        }
        Ok(current)
    }

    fn integrate_single(&self, name: &str) -> Result<PolyGaussWigner> {
        let t = self.index_of(name)?;
        let n = self.dim();
        let a = self.quad[(t, t)];
        if a <= 0.0 {
            return Err(CvfidError::NonIntegrable {
                label: name.to_string(),
                coefficient: a,
            });
        }
        let rest: Vec<usize> = (0..n).filter(|&i| i != t).collect();
        let m = rest.len();
        let cross = DVector::from_iterator(m, rest.iter().map(|&j| self.quad[(t, j)]));
        let b_t = self.lin[t];

        // exp(beta^2 / 4a) absorbed into the remaining exponential,
        // beta = b_t - 2 cross . v_rest
        let mut quad = DMatrix::from_fn(m, m, |r, c| self.quad[(rest[r], rest[c])]);
        quad -= (&cross * cross.transpose()).scale(1.0 / a);
        let mut lin = DVector::from_iterator(m, rest.iter().map(|&j| self.lin[j]));
        lin -= cross.scale(b_t / a);
        let constant = self.constant + b_t * b_t / (4.0 * a);

        // beta as a polynomial over the remaining variables
        let mut beta = Poly::zero();
        beta.add_term(vec![0u32; m], b_t);
        for (j, &cj) in cross.iter().enumerate() {
            if cj != 0.0 {
                let mut key = vec![0u32; m];
                key[j] = 1;
                beta.add_term(key, -2.0 * cj);
            }
        }

        let max_power = self.poly.max_exponent(t);
        // Hermite-style polynomials h_k(beta) with I_k = sqrt(pi/a)
        // exp(beta^2/4a) h_k(beta): h_0 = 1, h_{k+1} = h_k' + beta/(2a) h_k,
        // as univariate coefficient vectors in beta.
        let mut h_univ: Vec<Vec<f64>> = Vec::with_capacity(max_power as usize + 1);
        h_univ.push(vec![1.0]);
        for k in 0..max_power as usize {
            let prev = &h_univ[k];
            let mut next = vec![0.0; prev.len() + 1];
            for (j, &cj) in prev.iter().enumerate() {
                // derivative term
                if j >= 1 {
                    next[j - 1] += j as f64 * cj;
                }
                // beta/(2a) term
                next[j + 1] += cj / (2.0 * a);
            }
            h_univ.push(next);
        }

        // powers of beta as rest-polynomials
        let mut beta_pow: Vec<Poly> = Vec::with_capacity(max_power as usize + 1);
        beta_pow.push(Poly::one(m));
        for j in 1..=max_power as usize {
            let next = beta_pow[j - 1].mul(&beta);
            beta_pow.push(next);
        }

        // group the polynomial by the power of the integrated variable
        let groups = self.poly.split_by_variable(t);
        let sqrt_pi_a = (std::f64::consts::PI / a).sqrt();
        let mut poly = Poly::zero();
        for (power, q_rest) in groups {
            // expand h_power(beta) over the remaining variables
            let mut h_expanded = Poly::zero();
            for (j, &cj) in h_univ[power as usize].iter().enumerate() {
                if cj != 0.0 {
                    h_expanded.add_scaled(&beta_pow[j], cj);
                }
            }
            poly.add_scaled(&q_rest.mul(&h_expanded), sqrt_pi_a);
        }

        let labels = rest.iter().map(|&j| self.labels[j].clone()).collect();
        PolyGaussWigner::from_parts(labels, poly.to_map(), quad, lin, constant)
    }

    /// Partially evaluates the function at `name = value` (the measurement
    /// analogue: the result keeps its conditioning weight and is not
    /// renormalized).
    pub fn evaluate_at(&self, name: &str, value: f64) -> Result<PolyGaussWigner> {
        let t = self.index_of(name)?;
        let n = self.dim();
        let rest: Vec<usize> = (0..n).filter(|&i| i != t).collect();
        let m = rest.len();
        let quad = DMatrix::from_fn(m, m, |r, c| self.quad[(rest[r], rest[c])]);
        let mut lin = DVector::from_iterator(m, rest.iter().map(|&j| self.lin[j]));
        for (r, &j) in rest.iter().enumerate() {
            lin[r] -= 2.0 * self.quad[(t, j)] * value;
        }
        let constant = self.constant - self.quad[(t, t)] * value * value + self.lin[t] * value;
        let poly = self.poly.evaluate_variable(t, value);
        let labels = rest.iter().map(|&j| self.labels[j].clone()).collect();
        PolyGaussWigner::from_parts(labels, poly.to_map(), quad, lin, constant)
    }

    /// The total integral over all variables.
    pub fn total_integral(&self) -> Result<f64> {
        let names: Vec<String> = self.labels.iter().map(|l| l.name.clone()).collect();
        self.integrate_out(&names)?.constant_value()
    }

    /// Value of a zero-variable poly-Gauss function.
    pub fn constant_value(&self) -> Result<f64> {
        if self.dim() != 0 {
            return Err(CvfidError::DimensionMismatch {
                expected: 0,
                got: self.dim(),
            });
        }
        Ok(self.poly.get(&[]) * self.constant.exp())
    }
}

/// Overlap fidelity `2 pi integral(W1 W2)` of two single-mode Wigner
/// functions over the same two variables; `w1` must be a pure state for the
/// overlap to be a fidelity.
pub fn overlap(w1: &PolyGaussWigner, w2: &PolyGaussWigner) -> Result<f64> {
    if w1.dim() != 2 || w2.dim() != 2 {
        return Err(CvfidError::DimensionMismatch {
            expected: 2,
            got: w1.dim().max(w2.dim()),
        });
    }
    let mut names1: Vec<&str> = w1.labels().iter().map(|l| l.name.as_str()).collect();
    let mut names2: Vec<&str> = w2.labels().iter().map(|l| l.name.as_str()).collect();
    names1.sort_unstable();
    names2.sort_unstable();
    if names1 != names2 {
        return Err(CvfidError::LabelConflict(format!(
            "overlap requires matching variables, got {names1:?} vs {names2:?}"
        )));
    }
    let product = w1.product(w2)?;
    Ok(2.0 * std::f64::consts::PI * product.total_integral()?)
}
