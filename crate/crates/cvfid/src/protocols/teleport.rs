//! Teleportation of an unknown coherent state through an entangled Gaussian
//! channel, with feedback gain.
//!
//! The input ensemble is the vacuum displaced by classical variables
//! `(x_cl, p_cl)` of variance parameter `v_c`. Mode 3 carries the input,
//! modes 1 and 2 the entangled channel; the joint quadratures
//! `x_- = (x_2 - x_3)/sqrt(2)` and `p_+ = (p_2 + p_3)/sqrt(2)` are measured
//! and mode 1 is displaced by `g sqrt(2)` times the outcomes. Verification
//! undoes the classical displacement on mode 1 and scores the remaining
//! quantum state against the vacuum.

use super::params::{FidelityResult, Method, ProtocolParams, TeleportationParams};
use crate::error::Result;
use crate::labels::{pair, VariableKind, VariableLabel};
use crate::linmap::{maps, LinearMap};
use crate::fidelity::fidelity_vs_vacuum;
use crate::measurement::{average_over_outcomes, MeasurementSpec};
use crate::state::GaussianState;
use nalgebra::{DMatrix, DVector};

/// Zero-mean entangled two-mode state over `(x_1, p_1, x_2, p_2)` with
/// diagonal `n` and correlations `+k` between the positions and `-k` between
/// the momenta. The collective variances are `Var(x_1 +/- x_2) = n +/- k`.
pub fn epr_covariance(n: f64, k: f64) -> Result<GaussianState> {
    TeleportationParams::new(n, k, 0.0, 0.0)?;
    let mut labels = pair("x_1", "p_1", VariableKind::Quantum, 0).to_vec();
    labels.extend(pair("x_2", "p_2", VariableKind::Quantum, 1));
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            n, 0.0, k, 0.0,
            0.0, n, 0.0, -k,
            k, 0.0, n, 0.0,
            0.0, -k, 0.0, n,
        ],
    );
    GaussianState::new(labels, DVector::zeros(4), cov)
}

/// Labels of the eight-variable joint system in pipeline order.
pub(crate) fn joint_labels() -> Vec<VariableLabel> {
    let mut labels = pair("x_1", "p_1", VariableKind::Quantum, 0).to_vec();
    labels.extend(pair("x_2", "p_2", VariableKind::Quantum, 1));
    labels.extend(pair("x_3", "p_3", VariableKind::Quantum, 2));
    labels.extend(pair("x_cl", "p_cl", VariableKind::Classical, 3));
    labels
}

pub(crate) fn plus_minus_labels() -> Vec<VariableLabel> {
    let mut labels = pair("x_1", "p_1", VariableKind::Quantum, 0).to_vec();
    labels.extend(pair("x_plus", "p_plus", VariableKind::Quantum, 1));
    labels.extend(pair("x_minus", "p_minus", VariableKind::Quantum, 2));
    labels.extend(pair("x_cl", "p_cl", VariableKind::Classical, 3));
    labels
}

/// The joint state over `(x_1, p_1, x_plus, p_plus, x_minus, p_minus, x_cl,
/// p_cl)` after input preparation and the basis change, before feedback.
pub fn joint_state_in_measurement_basis(params: &TeleportationParams) -> Result<GaussianState> {
    let labels = joint_labels();
    let channel = epr_covariance(params.n, params.k)?;
    let mut cov = DMatrix::identity(8, 8);
    cov.view_mut((0, 0), (4, 4)).copy_from(channel.cov());
    cov[(6, 6)] = params.v_c;
    cov[(7, 7)] = params.v_c;
    let state = GaussianState::new(labels.clone(), DVector::zeros(8), cov)?;

    // Displace the input mode by the classical variables.
    let displace = LinearMap::physical(
        maps::displace_by_classical(8, 4, 5, 6, 7),
        &labels,
        "S_d: x_3 += x_cl, p_3 += p_cl",
    )?;
    let state = state.apply_map(&displace)?;

    // Change modes 2 and 3 to the +/- basis.
    let basis = LinearMap::physical(
        maps::plus_minus_basis(8, [2, 3, 4, 5], [2, 3], [4, 5]),
        &labels,
        "T^(23)",
    )?;
    state.apply_map(&basis)?.with_labels(plus_minus_labels())
}

/// Runs the covariance pipeline and returns the outcome-averaged fidelity.
///
/// Feedback is folded in as an outcome-linear map before the measurement
/// average, so the result is the fidelity of the ensemble of conditioned,
/// displaced states for arbitrary gain; at the optimal gain the conditional
/// means cancel outcome by outcome and the averaged covariance coincides
/// with the conditioned one.
pub fn teleport_pipeline(params: &TeleportationParams) -> Result<FidelityResult> {
    let gamma_out = teleport_output_covariance(params)?;
    let value = fidelity_vs_vacuum(&gamma_out)?;
    FidelityResult::new(
        value,
        Method::CovariancePipeline,
        ProtocolParams::Teleport(*params),
    )
}

/// The 2x2 verified output covariance of the pipeline.
pub fn teleport_output_covariance(params: &TeleportationParams) -> Result<DMatrix<f64>> {
    let state = joint_state_in_measurement_basis(params)?;

    // Outcome-linear feedback: x_1 -> x_1 - g sqrt(2) x_minus,
    // p_1 -> p_1 + g sqrt(2) p_plus.
    let gain = params.g * std::f64::consts::SQRT_2;
    let feedback = LinearMap::new(
        maps::feedback(8, &[(0, 4, -gain), (1, 3, gain)]),
        "teleportation feedback",
    );
    let state = state.apply_map(&feedback)?;

    // Measure (p_plus, x_minus) and average the conditioned, displaced
    // ensemble over the outcomes.
    let spec = MeasurementSpec::homodyne(&["p_plus", "x_minus"]);
    let state = average_over_outcomes(&state, &spec)?;

    // Verification: undo the classical displacement on mode 1 and keep the
    // quantum block.
    let verify = LinearMap::physical(
        maps::undisplace_by_classical(4, 0, 1, 2, 3),
        state.labels(),
        "S_d^{-1} on (x_1, p_1)",
    )?;
    let state = state.apply_map(&verify)?;
    let out = state.marginal(&["x_1", "p_1"])?;
    Ok(out.cov().clone())
}

/// Closed-form fidelity at the optimal gain:
/// `2 (1 + n + v_c) / (1 + 2n + n^2 - k^2 + 2 v_c (1 + n - k))`.
pub fn teleport_fidelity_analytic(n: f64, k: f64, v_c: f64) -> f64 {
    2.0 * (1.0 + n + v_c) / (1.0 + 2.0 * n + n * n - k * k + 2.0 * v_c * (1.0 + n - k))
}

/// Optimal feedback gain `(k + v_c) / (1 + n + v_c)`.
pub fn optimal_gain_teleport(n: f64, k: f64, v_c: f64) -> f64 {
    (k + v_c) / (1.0 + n + v_c)
}
