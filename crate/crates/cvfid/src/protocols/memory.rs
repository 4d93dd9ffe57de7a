//! Quantum memory: storing an unknown coherent state of light in an atomic
//! spin ensemble via a QND interaction, homodyne detection and feedback.
//!
//! The light mode `(x_L, p_L)` is displaced by classical variables of
//! variance parameter `v_c`; the atoms start in a (possibly squeezed)
//! coherent state with covariance `diag(1/r, r)`. The interaction
//! `x_A -> x_A + kappa p_L`, `x_L -> x_L + kappa p_A` writes `p_L` onto
//! `x_A`; detecting `x_L` and displacing `p_A` by `-g` times the outcome
//! writes `-x_L` onto `p_A`. Verification displaces `x_A` by `-p_cl` and
//! `p_A` by `+x_cl` and scores against the vacuum.

use super::params::{FidelityResult, MemoryParams, Method, ProtocolParams};
use crate::error::Result;
use crate::fidelity::fidelity_vs_vacuum;
use crate::labels::{pair, VariableKind, VariableLabel};
use crate::linmap::{maps, LinearMap};
use crate::measurement::{average_over_outcomes, MeasurementSpec};
use crate::state::GaussianState;
use nalgebra::{DMatrix, DVector};

fn memory_labels() -> Vec<VariableLabel> {
    let mut labels = pair("x_A", "p_A", VariableKind::Quantum, 0).to_vec();
    labels.extend(pair("x_L", "p_L", VariableKind::Quantum, 1));
    labels.extend(pair("x_cl", "p_cl", VariableKind::Classical, 2));
    labels
}

/// The six-variable joint state after input preparation and the QND
/// interaction, before feedback and detection.
pub fn joint_state_after_interaction(params: &MemoryParams) -> Result<GaussianState> {
    let labels = memory_labels();
    let mut cov = DMatrix::identity(6, 6);
    cov[(0, 0)] = 1.0 / params.r;
    cov[(1, 1)] = params.r;
    cov[(4, 4)] = params.v_c;
    cov[(5, 5)] = params.v_c;
    let state = GaussianState::new(labels.clone(), DVector::zeros(6), cov)?;

    // Displace the light by the classical variables.
    let displace = LinearMap::physical(
        maps::displace_by_classical(6, 2, 3, 4, 5),
        &labels,
        "x_L += x_cl, p_L += p_cl",
    )?;
    let state = state.apply_map(&displace)?;

    // QND interaction of strength kappa.
    let interaction = LinearMap::physical(
        maps::qnd_interaction(6, 0, 1, 2, 3, params.kappa),
        &labels,
        "x_A += kappa p_L, x_L += kappa p_A",
    )?;
    state.apply_map(&interaction)
}

/// Runs the covariance pipeline and returns the outcome-averaged storage
/// fidelity (see the teleportation pipeline for the averaging argument).
pub fn memory_pipeline(params: &MemoryParams) -> Result<FidelityResult> {
    let gamma_out = memory_output_covariance(params)?;
    let value = fidelity_vs_vacuum(&gamma_out)?;
    FidelityResult::new(value, Method::CovariancePipeline, ProtocolParams::Memory(*params))
}

/// The 2x2 verified output covariance of the pipeline.
pub fn memory_output_covariance(params: &MemoryParams) -> Result<DMatrix<f64>> {
    let state = joint_state_after_interaction(params)?;

    // Outcome-linear feedback p_A -> p_A - g x_L.
    let feedback = LinearMap::new(maps::feedback(6, &[(1, 2, -params.g)]), "memory feedback");
    let state = state.apply_map(&feedback)?;

    // Detect x_L; average the conditioned ensemble over outcomes.
    let spec = MeasurementSpec::homodyne(&["x_L"]);
    let state = average_over_outcomes(&state, &spec)?;

    // Verification: x_A -> x_A - p_cl, p_A -> p_A + x_cl, then keep the
    // atomic block.
    let mut verify = DMatrix::identity(4, 4);
    verify[(0, 3)] = -1.0;
    verify[(1, 2)] = 1.0;
    let verify = LinearMap::physical(verify, state.labels(), "x_A -= p_cl, p_A += x_cl")?;
    let state = state.apply_map(&verify)?;
    let out = state.marginal(&["x_A", "p_A"])?;
    Ok(out.cov().clone())
}

/// Closed-form storage fidelity at the optimal gain, for atomic squeezing
/// `r >= 1`:
/// `2 sqrt(r (1 + kappa^2 r + v_c) / (D1 D2))` with
/// `D1 = r (1 + v_c kappa^2 - 2 v_c kappa + v_c + kappa^2) + 2 v_c + 1` and
/// `D2 = r (1 + v_c kappa^2 - 2 v_c kappa + v_c + kappa^2) + 1`.
/// At `r = 1` this reduces to the unsqueezed form.
pub fn memory_fidelity_analytic(kappa: f64, v_c: f64, r: f64) -> f64 {
    let core = r * (1.0 + v_c * kappa * kappa - 2.0 * v_c * kappa + v_c + kappa * kappa);
    let d1 = core + 2.0 * v_c + 1.0;
    let d2 = core + 1.0;
    2.0 * (r * (1.0 + kappa * kappa * r + v_c) / (d1 * d2)).sqrt()
}

/// Optimal feedback gain `(kappa r + v_c) / (1 + kappa^2 r + v_c)`.
pub fn optimal_gain_memory(kappa: f64, v_c: f64, r: f64) -> f64 {
    (kappa * r + v_c) / (1.0 + kappa * kappa * r + v_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::condition_on_measurement;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spot_values_from_known_limits() {
        // kappa = 1, known vacuum input
        let p = MemoryParams::with_optimal_gain(1.0, 1.0, 0.0).unwrap();
        let f = memory_pipeline(&p).unwrap();
        assert_abs_diff_eq!(f.value, 2.0 * 2.0_f64.sqrt() / 3.0, epsilon = 1e-12);

        // kappa = 1, completely unknown input
        let p = MemoryParams::with_optimal_gain(1.0, 1.0, 1e6).unwrap();
        let f = memory_pipeline(&p).unwrap();
        assert_abs_diff_eq!(f.value, (2.0_f64 / 3.0).sqrt(), epsilon = 1e-3);

        // no interaction, known vacuum: perfect storage
        let p = MemoryParams::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let f = memory_pipeline(&p).unwrap();
        assert_abs_diff_eq!(f.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn analytic_reduces_at_r_equal_one() {
        // r = 1 must reproduce the unsqueezed closed form on a grid.
        for kappa in [0.0, 0.5, 1.0, 1.5] {
            for v_c in [0.0, 1.0, 10.0] {
                let by_r = memory_fidelity_analytic(kappa, v_c, 1.0);
                let k2 = kappa * kappa;
                let direct = 2.0
                    * ((1.0 + k2 + v_c)
                        / ((1.0 + v_c * k2 - 2.0 * v_c * kappa + v_c + k2 + 2.0 * v_c + 1.0)
                            * (1.0 + v_c * k2 - 2.0 * v_c * kappa + v_c + k2 + 1.0)))
                        .sqrt();
                assert_abs_diff_eq!(by_r, direct, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn squeezed_limit_for_large_classical_variance() {
        for r in [1.0, 2.0, 4.0, 8.0] {
            let f = memory_fidelity_analytic(1.0, 1e6, r);
            assert_abs_diff_eq!(f, (2.0 * r / (2.0 * r + 1.0)).sqrt(), epsilon = 1e-3);
        }
        // fidelity vanishes at kappa != 1 when the input is fully unknown
        for kappa in [0.5, 1.5] {
            assert!(memory_fidelity_analytic(kappa, 1e8, 1.0) < 1e-3);
        }
    }

    #[test]
    fn optimal_gain_examples() {
        for (kappa, v_c) in [(0.5, 0.0), (1.0, 3.0), (2.0, 0.7)] {
            assert_abs_diff_eq!(
                optimal_gain_memory(kappa, v_c, 1.0),
                (kappa + v_c) / (1.0 + kappa * kappa + v_c),
                epsilon = 1e-15
            );
        }
        assert_abs_diff_eq!(optimal_gain_memory(1.3, 1e9, 2.0), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(optimal_gain_memory(0.0, 0.0, 1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pipeline_matches_analytic_at_optimal_gain() {
        for kappa in [0.0, 0.5, 1.0, 1.5] {
            for v_c in [0.0, 1.0, 10.0] {
                for r in [1.0, 2.0, 4.0] {
                    let p = MemoryParams::with_optimal_gain(kappa, r, v_c).unwrap();
                    let f = memory_pipeline(&p).unwrap();
                    let reference = memory_fidelity_analytic(kappa, v_c, r);
                    assert_abs_diff_eq!(f.value, reference, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn conditioned_means_match_closed_forms() {
        // <p_A | xi> = kappa/(1+kappa^2+v_c) xi and <x_cl | xi> =
        // v_c/(1+kappa^2+v_c) xi at r = 1.
        let (kappa, v_c) = (0.8, 2.5);
        let params = MemoryParams::new(kappa, 1.0, v_c, 0.0).unwrap();
        let joint = joint_state_after_interaction(&params).unwrap();
        let spec = MeasurementSpec::homodyne(&["x_L"]);
        let xi = 1.7;
        let cond = condition_on_measurement(&joint, &spec, &DVector::from_vec(vec![xi])).unwrap();
        let denom = 1.0 + kappa * kappa + v_c;
        assert_abs_diff_eq!(cond.mean_of("p_A").unwrap(), kappa / denom * xi, epsilon = 1e-12);
        assert_abs_diff_eq!(cond.mean_of("x_cl").unwrap(), v_c / denom * xi, epsilon = 1e-12);
        assert_abs_diff_eq!(cond.mean_of("x_A").unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_is_maximal_at_the_analytic_gain() {
        let (kappa, r, v_c) = (1.0, 1.0, 3.0);
        let g_star = optimal_gain_memory(kappa, v_c, r);
        let f = |g: f64| {
            memory_pipeline(&MemoryParams::new(kappa, r, v_c, g).unwrap())
                .unwrap()
                .value
        };
        let h = 1e-5;
        let derivative = (f(g_star + h) - f(g_star - h)) / (2.0 * h);
        assert!(derivative.abs() < 1e-6, "dF/dg = {derivative}");
        assert!(f(g_star) > f(g_star + 0.1));
        assert!(f(g_star) > f(g_star - 0.1));
    }
}
