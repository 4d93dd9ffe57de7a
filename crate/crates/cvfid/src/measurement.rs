//! Homodyne measurement conditioning.
//!
//! Measuring a quadrature of a joint Gaussian leaves the remaining variables
//! Gaussian. With the state split into unmeasured block `A`, candidate block
//! `B` (the measured variables and their conjugates) and cross block `C`,
//! the update is
//!
//! `A -> A' = A - C (pi B pi)^- C^T`
//!
//! with `pi` the 0/1 projector selecting the actually measured entries of the
//! candidate block and `(.)^-` the Moore-Penrose pseudoinverse. Means update
//! affinely: `m_A -> m_A + C (pi B pi)^- pi (outcomes - m_B)`, which reduces
//! to the zero-prior form when all means vanish. The conditioned covariance
//! does not depend on the outcome values.

use crate::error::{CvfidError, Result};
use crate::labels::{self, VariableLabel};
use crate::pinv::pseudo_inverse;
use crate::state::GaussianState;
use nalgebra::{DMatrix, DVector};

/// Which quadratures are measured. The candidate block and projector are
/// derived from the state the spec is applied to.
#[derive(Debug, Clone)]
pub struct MeasurementSpec {
    measured: Vec<String>,
}

/// The index bookkeeping for one measurement on one state.
struct Partition {
    kept: Vec<usize>,
    candidate: Vec<usize>,
    /// Diagonal of the projector on the candidate block.
    projector: Vec<f64>,
    /// Positions of the measured variables within the candidate block, in
    /// the order of `MeasurementSpec::measured`.
    measured_slots: Vec<usize>,
}

impl MeasurementSpec {
    /// Homodyne detection of the named quadratures.
    pub fn homodyne<S: AsRef<str>>(measured: &[S]) -> Self {
        MeasurementSpec {
            measured: measured.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn measured(&self) -> &[String] {
        &self.measured
    }

    /// Projector diagonal on the candidate block of `state` (unity at the
    /// measured entries, zero at their conjugates).
    pub fn projector_for(&self, state: &GaussianState) -> Result<Vec<f64>> {
        Ok(self.partition(state.labels())?.projector)
    }

    fn partition(&self, state_labels: &[VariableLabel]) -> Result<Partition> {
        if self.measured.is_empty() {
            return Err(CvfidError::invalid_parameter(
                "measured",
                "at least one variable must be measured",
            ));
        }
        let mut measured_idx = Vec::with_capacity(self.measured.len());
        for name in &self.measured {
            let idx = labels::index_of(state_labels, name)?;
            if !state_labels[idx].is_quantum() {
                return Err(CvfidError::InvalidMeasurement(
                    name.clone(),
                    "only quantum variables can be measured".into(),
                ));
            }
            if measured_idx.contains(&idx) {
                return Err(CvfidError::InvalidMeasurement(
                    name.clone(),
                    "measured twice".into(),
                ));
            }
            measured_idx.push(idx);
        }
        for &idx in &measured_idx {
            let conj = labels::conjugate_of(state_labels, idx)
                .ok_or_else(|| CvfidError::UnpairedQuantum(state_labels[idx].name.clone()))?;
            if measured_idx.contains(&conj) {
                return Err(CvfidError::InvalidMeasurement(
                    state_labels[idx].name.clone(),
                    format!(
                        "conjugate `{}` measured simultaneously",
                        state_labels[conj].name
                    ),
                ));
            }
        }
        // Candidate block: measured variables plus conjugates, in state order.
        let mut in_candidate = vec![false; state_labels.len()];
        for &idx in &measured_idx {
            in_candidate[idx] = true;
            in_candidate[labels::conjugate_of(state_labels, idx).unwrap()] = true;
        }
        let candidate: Vec<usize> = (0..state_labels.len()).filter(|&i| in_candidate[i]).collect();
        let kept: Vec<usize> = (0..state_labels.len()).filter(|&i| !in_candidate[i]).collect();
        let projector: Vec<f64> = candidate
            .iter()
            .map(|i| if measured_idx.contains(i) { 1.0 } else { 0.0 })
            .collect();
        let measured_slots = measured_idx
            .iter()
            .map(|i| candidate.iter().position(|c| c == i).unwrap())
            .collect();
        Ok(Partition {
            kept,
            candidate,
            projector,
            measured_slots,
        })
    }
}

/// Conditions `state` on the given measurement outcomes (one entry per
/// measured variable, in spec order). The measured variables and their
/// conjugates are removed from the returned state.
pub fn condition_on_measurement(
    state: &GaussianState,
    spec: &MeasurementSpec,
    outcomes: &DVector<f64>,
) -> Result<GaussianState> {
    if outcomes.len() != spec.measured().len() {
        return Err(CvfidError::DimensionMismatch {
            expected: spec.measured().len(),
            got: outcomes.len(),
        });
    }
    let part = spec.partition(state.labels())?;
    let (a, c, b) = split_blocks(state, &part);
    let pi_b_pi = DMatrix::from_fn(b.nrows(), b.ncols(), |r, col| {
        part.projector[r] * b[(r, col)] * part.projector[col]
    });
    let pinv = pseudo_inverse(&pi_b_pi)?;
    let gain = &c * &pinv;
    let cov = &a - &gain * c.transpose();

    // pi * (outcomes - m_B), expanded over the candidate block.
    let mut innovation = DVector::zeros(part.candidate.len());
    for (k, &slot) in part.measured_slots.iter().enumerate() {
        innovation[slot] = outcomes[k] - state.mean()[part.candidate[slot]];
    }
    let m_a = DVector::from_iterator(part.kept.len(), part.kept.iter().map(|&i| state.mean()[i]));
    let mean = m_a + &gain * innovation;

    let labels: Vec<_> = part.kept.iter().map(|&i| state.labels()[i].clone()).collect();
    GaussianState::new(labels, mean, cov)
}

/// The state of the unmeasured variables averaged over all measurement
/// outcomes. Outcome-conditioned states share the covariance
/// `A - C (pi B pi)^- C^T` while their means spread linearly with the
/// outcome; the Gaussian mixture over outcomes recombines to covariance `A`,
/// i.e. to the plain marginal. The two agree exactly when the conditional
/// means are outcome-independent.
pub fn average_over_outcomes(
    state: &GaussianState,
    spec: &MeasurementSpec,
) -> Result<GaussianState> {
    let part = spec.partition(state.labels())?;
    let keep: Vec<&str> = part
        .kept
        .iter()
        .map(|&i| state.labels()[i].name.as_str())
        .collect();
    state.marginal(&keep)
}

fn split_blocks(
    state: &GaussianState,
    part: &Partition,
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let cov = state.cov();
    let a = DMatrix::from_fn(part.kept.len(), part.kept.len(), |r, c| {
        cov[(part.kept[r], part.kept[c])]
    });
    let cross = DMatrix::from_fn(part.kept.len(), part.candidate.len(), |r, c| {
        cov[(part.kept[r], part.candidate[c])]
    });
    let b = DMatrix::from_fn(part.candidate.len(), part.candidate.len(), |r, c| {
        cov[(part.candidate[r], part.candidate[c])]
    });
    (a, cross, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{pair, VariableKind};
    use approx::assert_abs_diff_eq;

    fn state_4x4(cov: DMatrix<f64>, mean: DVector<f64>) -> GaussianState {
        let mut labels = pair("x_a", "p_a", VariableKind::Quantum, 0).to_vec();
        labels.extend(pair("x_m", "p_m", VariableKind::Quantum, 1));
        GaussianState::new(labels, mean, cov).unwrap()
    }

    #[test]
    fn scalar_schur_complement() {
        // One measured variable with variance b and cross column c: the mean
        // shifts by c * xi / b and the covariance drops by c c^T / b.
        let b = 4.0;
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.0, 1.0, 0.0,
                0.0, 2.0, 0.5, 0.0,
                1.0, 0.5, b, 0.0,
                0.0, 0.0, 0.0, 3.0,
            ],
        );
        let state = state_4x4(cov, DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_m"]);
        let xi = 1.3;
        let out = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![xi])).unwrap();

        assert_eq!(out.dim(), 2);
        let c_col = DVector::from_vec(vec![1.0, 0.5]);
        let expect_mean = &c_col * (xi / b);
        let expect_cov =
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]) - (&c_col * c_col.transpose()) / b;
        assert_abs_diff_eq!(*out.mean(), expect_mean, epsilon = 1e-12);
        assert_abs_diff_eq!(*out.cov(), expect_cov, epsilon = 1e-12);
    }

    #[test]
    fn conditioned_covariance_ignores_outcomes() {
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.1, 1.0, 0.2,
                0.1, 2.0, 0.5, 0.0,
                1.0, 0.5, 4.0, 0.0,
                0.2, 0.0, 0.0, 3.0,
            ],
        );
        let state = state_4x4(cov, DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_m"]);
        let a = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![0.3])).unwrap();
        let b = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![-7.1])).unwrap();
        assert_eq!(a.cov(), b.cov());
    }

    #[test]
    fn conjugate_pair_cannot_be_jointly_measured() {
        let state = state_4x4(DMatrix::identity(4, 4), DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_m", "p_m"]);
        let res = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![0.0, 0.0]));
        assert!(matches!(res, Err(CvfidError::InvalidMeasurement(..))));
    }

    #[test]
    fn outcome_length_must_match() {
        let state = state_4x4(DMatrix::identity(4, 4), DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_m"]);
        let res = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![0.0, 1.0]));
        assert!(matches!(res, Err(CvfidError::DimensionMismatch { .. })));
    }

    #[test]
    fn unknown_measured_variable() {
        let state = state_4x4(DMatrix::identity(4, 4), DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_zzz"]);
        let res = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![0.0]));
        assert!(matches!(res, Err(CvfidError::UnknownLabel(_))));
    }

    #[test]
    fn average_over_outcomes_is_marginal() {
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.1, 1.0, 0.2,
                0.1, 2.0, 0.5, 0.0,
                1.0, 0.5, 4.0, 0.0,
                0.2, 0.0, 0.0, 3.0,
            ],
        );
        let state = state_4x4(cov, DVector::zeros(4));
        let spec = MeasurementSpec::homodyne(&["x_m"]);
        let avg = average_over_outcomes(&state, &spec).unwrap();
        assert_eq!(avg.dim(), 2);
        assert_eq!(avg.cov()[(0, 0)], 2.0);
        // The averaged covariance dominates the conditioned one by the
        // spread of conditional means.
        let cond = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![0.0])).unwrap();
        let diff = avg.cov() - cond.cov();
        assert!(diff.symmetric_eigen().eigenvalues.min() > -1e-12);
    }

    #[test]
    fn nonzero_prior_means_enter_affinely() {
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                2.0, 0.0, 1.0, 0.0,
                0.0, 2.0, 0.0, 0.0,
                1.0, 0.0, 4.0, 0.0,
                0.0, 0.0, 0.0, 3.0,
            ],
        );
        let mean = DVector::from_vec(vec![0.5, 0.0, 2.0, 0.0]);
        let state = state_4x4(cov, mean);
        let spec = MeasurementSpec::homodyne(&["x_m"]);
        let xi = 2.0; // equals the prior mean: no innovation
        let out = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![xi])).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 0.5, epsilon = 1e-14);
        let xi = 6.0; // innovation 4 -> shift by (1/4)*4 = 1
        let out = condition_on_measurement(&state, &spec, &DVector::from_vec(vec![xi])).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 1.5, epsilon = 1e-14);
    }
}
