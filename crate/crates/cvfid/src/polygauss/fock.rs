//! Fock-state Wigner functions and teleportation of Fock inputs through an
//! entangled Gaussian channel.

use super::{overlap, PolyGaussWigner};
use crate::error::{CvfidError, Result};
use crate::labels::{pair, VariableKind, VariableLabel};
use crate::linmap::{maps, LinearMap};
use crate::protocols::params::{
    FidelityResult, FockEnsembleParams, FockParams, Method, ProtocolParams, TeleportationParams,
};
use crate::protocols::teleport::epr_covariance;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Wigner function of the `N`-photon Fock state over variables `(x, p)`:
/// `((-1)^N / pi) L_N(2(x^2 + p^2)) exp(-x^2 - p^2)` with `L_N` the Laguerre
/// polynomial; `N = 0` is the vacuum and `N = 1` the printed
/// `(2x^2 + 2p^2 - 1)/pi` form. Coefficient growth limits double precision
/// to roughly `N <= 16` at full accuracy (the terms of a weighted ensemble
/// degrade gracefully beyond that, in step with their geometric weights).
pub fn fock_wigner(n_photon: u32) -> Result<PolyGaussWigner> {
    let labels = pair("x", "p", VariableKind::Quantum, 0).to_vec();
    fock_wigner_over(n_photon, labels)
}

/// [`fock_wigner`] over caller-supplied variable labels.
pub fn fock_wigner_over(n_photon: u32, labels: Vec<VariableLabel>) -> Result<PolyGaussWigner> {
    if labels.len() != 2 {
        return Err(CvfidError::DimensionMismatch {
            expected: 2,
            got: labels.len(),
        });
    }
    let sign = if n_photon % 2 == 0 { 1.0 } else { -1.0 };
    let front = sign / std::f64::consts::PI;
    let mut poly = BTreeMap::new();
    // L_N(z) = sum_k (-1)^k C(N,k) z^k / k!, z = 2(x^2 + p^2)
    let mut z_coeff = 1.0; // (-1)^k C(N,k) 2^k / k!
    for k in 0..=n_photon {
        for j in 0..=k {
            let c = front * z_coeff * binomial(k, j);
            *poly.entry(vec![2 * j, 2 * (k - j)]).or_insert(0.0) += c;
        }
        z_coeff *= -2.0 * (n_photon - k) as f64 / ((k + 1) * (k + 1)) as f64;
    }
    PolyGaussWigner::from_parts(
        labels,
        poly,
        DMatrix::identity(2, 2),
        DVector::zeros(2),
        0.0,
    )
}

fn mode_pair(x: &str, p: &str, idx: usize) -> Vec<VariableLabel> {
    pair(x, p, VariableKind::Quantum, idx).to_vec()
}

/// The six-variable labels of the Fock teleportation pipeline after the
/// basis change.
fn pm_labels_6() -> Vec<VariableLabel> {
    let mut labels = mode_pair("x_1", "p_1", 0);
    labels.extend(mode_pair("x_plus", "p_plus", 1));
    labels.extend(mode_pair("x_minus", "p_minus", 2));
    labels
}

/// Teleports the `N`-photon Fock state through the `(n, k)` channel at gain
/// `g`, entirely within the poly-Gauss calculus: beam-splitter basis change
/// and feedback enter as substitutions, the average over measurement
/// outcomes and unmeasured conjugates as exact integration, and the fidelity
/// as the overlap with the input Wigner function.
pub fn fock_teleport_fidelity(n_photon: u32, n: f64, k: f64, g: f64) -> Result<FidelityResult> {
    let value = fock_teleport_output(n_photon, n, k, g, None)?;
    FidelityResult::new(
        value,
        Method::Polygauss,
        ProtocolParams::Fock(FockParams {
            n_photon,
            n,
            k,
            g,
            v_c: 0.0,
        }),
    )
}

/// Teleportation of the Fock state displaced by an unknown Gaussian amount
/// of variance parameter `v_c`; verification undoes the classical
/// displacement before comparing against the undisplaced Fock state. With
/// `v_c = 0` this is exactly [`fock_teleport_fidelity`].
pub fn displaced_fock_teleport_fidelity(
    n_photon: u32,
    n: f64,
    k: f64,
    g: f64,
    v_c: f64,
) -> Result<FidelityResult> {
    if !(v_c >= 0.0) {
        return Err(CvfidError::invalid_parameter(
            "v_c",
            format!("classical variance must be >= 0, got {v_c}"),
        ));
    }
    let value = if v_c == 0.0 {
        // zero-width displacement distribution
        fock_teleport_output(n_photon, n, k, g, None)?
    } else {
        fock_teleport_output(n_photon, n, k, g, Some(v_c))?
    };
    FidelityResult::new(
        value,
        Method::Polygauss,
        ProtocolParams::Fock(FockParams {
            n_photon,
            n,
            k,
            g,
            v_c,
        }),
    )
}

fn fock_teleport_output(
    n_photon: u32,
    n: f64,
    k: f64,
    g: f64,
    displaced: Option<f64>,
) -> Result<f64> {
    TeleportationParams::new(n, k, 0.0, g)?;
    let channel_state = epr_covariance(n, k)?;
    let channel = PolyGaussWigner::gaussian(
        channel_state.labels().to_vec(),
        channel_state.mean(),
        channel_state.cov(),
    )?;
    let input = fock_wigner_over(n_photon, mode_pair("x_3", "p_3", 2))?;
    let mut joint = channel.product(&input)?;

    let mut labels_pm = pm_labels_6();
    if let Some(v_c) = displaced {
        let classical = PolyGaussWigner::gaussian(
            pair("x_cl", "p_cl", VariableKind::Classical, 3).to_vec(),
            &DVector::zeros(2),
            &DMatrix::identity(2, 2).scale(v_c),
        )?;
        joint = joint.product(&classical)?;
        // displace the input mode by the classical variables
        let displace = LinearMap::new(maps::displace_by_classical(8, 4, 5, 6, 7), "S_d");
        joint = joint.substitute_linear(&displace)?;
        labels_pm.extend(pair("x_cl", "p_cl", VariableKind::Classical, 3));
    }
    let dim = joint.dim();

    // basis change on modes 2 and 3
    let basis = LinearMap::new(
        maps::plus_minus_basis(dim, [2, 3, 4, 5], [2, 3], [4, 5]),
        "T^(23)",
    );
    let joint = joint.substitute_linear(&basis)?.with_labels(labels_pm)?;

    // outcome-linear feedback, then exact averaging over outcomes and the
    // unmeasured conjugates
    let gain = g * std::f64::consts::SQRT_2;
    let feedback = LinearMap::new(maps::feedback(dim, &[(0, 4, -gain), (1, 3, gain)]), "feedback");
    let joint = joint.substitute_linear(&feedback)?;
    let joint = joint.integrate_out(&["x_plus", "p_plus", "x_minus", "p_minus"])?;

    let reference = fock_wigner_over(n_photon, mode_pair("x_1", "p_1", 0))?;
    if displaced.is_none() {
        return overlap(&reference, &joint);
    }

    // undo the classical displacement on the output mode, weight by the
    // reference state and integrate everything
    let undisplace = LinearMap::new(maps::undisplace_by_classical(4, 0, 1, 2, 3), "S_d^{-1}");
    let joint = joint.substitute_linear(&undisplace)?;
    let weighted = joint.product(&reference)?;
    Ok(2.0 * std::f64::consts::PI * weighted.total_integral()?)
}

/// Unit-gain teleportation fidelity of the `N`-photon state, evaluated as a
/// finite sum that is stable for any `N`.
///
/// At unit gain the verified output is the input convolved with an isotropic
/// Gaussian of covariance `2 delta` (the channel noise `x_1 - x_2`,
/// `p_1 + p_2` is independent of the input). In Fourier space the overlap
/// collapses to the radial integral `int_0^inf L_N(u)^2 exp(-(1+delta) u)
/// du`, and expanding the product of the two Laguerre generating functions
/// gives
///
/// `F_N = 1/(1+delta) * sum_{l=0}^{N} (2N-l)! / ((N-l)!^2 l!) *
///        delta^{2(N-l)} (1-delta)^l / (1+delta)^{2N-l}`.
///
/// For `delta <= 1` every term is non-negative, so the sum carries no
/// cancellation; terms are accumulated through a log-factorial table to
/// avoid overflow at large `N`. Cross-checked against the symbolic
/// convolution route and the full six-variable pipeline in the tests.
pub fn fock_unit_gain_fidelity(n_photon: u32, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(CvfidError::invalid_parameter(
            "delta",
            format!("EPR variance must be >= 0, got {delta}"),
        ));
    }
    if delta == 0.0 {
        return Ok(1.0);
    }
    let n = n_photon as usize;
    // ln k! for k = 0..=2N
    let mut ln_fact = vec![0.0_f64; 2 * n + 1];
    for k in 1..=2 * n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_delta = delta.ln();
    let ln_one_plus = (1.0 + delta).ln();
    let one_minus = 1.0 - delta;
    let ln_abs_one_minus = one_minus.abs().ln();

    let mut ln_terms = Vec::with_capacity(n + 1);
    let mut signs = Vec::with_capacity(n + 1);
    let mut max_ln = f64::NEG_INFINITY;
    for l in 0..=n {
        if one_minus == 0.0 && l > 0 {
            continue;
        }
        let mut ln_t = ln_fact[2 * n - l] - 2.0 * ln_fact[n - l] - ln_fact[l]
            + 2.0 * (n - l) as f64 * ln_delta
            - (2 * n - l) as f64 * ln_one_plus;
        if l > 0 {
            ln_t += l as f64 * ln_abs_one_minus;
        }
        let sign = if one_minus < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
        max_ln = max_ln.max(ln_t);
        ln_terms.push(ln_t);
        signs.push(sign);
    }
    let sum: f64 = ln_terms
        .iter()
        .zip(&signs)
        .map(|(&ln_t, &s)| s * (ln_t - max_ln).exp())
        .sum();
    Ok(sum * max_ln.exp() / (1.0 + delta))
}

/// The same unit-gain fidelity computed symbolically inside the poly-Gauss
/// calculus: the input is convolved with the channel-noise Gaussian over an
/// explicit difference variable and the overlap integral is carried out
/// exactly. Coefficient cancellations limit this route to roughly
/// `N <= 10`; it exists as an independent cross-check of
/// [`fock_unit_gain_fidelity`].
pub fn fock_unit_gain_fidelity_symbolic(n_photon: u32, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(CvfidError::invalid_parameter(
            "delta",
            format!("EPR variance must be >= 0, got {delta}"),
        ));
    }
    if delta == 0.0 {
        return Ok(1.0);
    }
    let out_pair = mode_pair("x", "p", 0);
    let noise_pair = mode_pair("d_x", "d_p", 1);
    // Convolve over the noise variable d: W_out(w) = integral of
    // W_N(w + d) G(d) dd. Writing the input at the shifted argument keeps
    // every polynomial coupling O(1) even for narrow noise (small delta);
    // coupling the noise kernel to the output variable instead would scale
    // as 1/delta and shred the cancellations in the Laguerre terms.
    let w_in = fock_wigner_over(n_photon, out_pair.clone())?;
    let joint = w_in.product(&PolyGaussWigner::unit(noise_pair.clone())?)?;
    let mut shift = DMatrix::identity(4, 4);
    shift[(0, 2)] = -1.0;
    shift[(1, 3)] = -1.0;
    // W'(x, p, d) = W_N(x + d_x, p + d_p)
    let joint = joint.substitute_linear(&LinearMap::new(shift, "x -= d_x, p -= d_p"))?;
    let noise = PolyGaussWigner::gaussian(
        noise_pair,
        &DVector::zeros(2),
        &DMatrix::identity(2, 2).scale(2.0 * delta),
    )?;
    let w_out = joint.product(&noise)?.integrate_out(&["d_x", "d_p"])?;
    let reference = fock_wigner_over(n_photon, out_pair)?;
    overlap(&reference, &w_out)
}

/// A truncated ensemble fidelity together with its truncation-tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSum {
    pub fidelity: FidelityResult,
    pub tail_bound: f64,
}

/// Average unit-gain teleportation fidelity of the geometric Fock ensemble
/// `p_N = (1 - lambda) lambda^N`: the truncated sum
/// `sum_{N <= n_max} p_N F_N(delta)` with tail bound
/// `lambda^{n_max + 1} / (1 - lambda)`. Fails if the tail bound exceeds
/// `max_tail` when given.
pub fn fock_ensemble_fidelity(
    params: &FockEnsembleParams,
    max_tail: Option<f64>,
) -> Result<EnsembleSum> {
    FockEnsembleParams::new(params.lambda, params.delta, params.n_max)?;
    let tail_bound = params.tail_bound();
    if let Some(tol) = max_tail {
        if tail_bound > tol {
            return Err(CvfidError::TruncationTail {
                bound: tail_bound,
                tolerance: tol,
            });
        }
    }
    let mut sum = 0.0;
    let mut weight = 1.0 - params.lambda;
    for n_photon in 0..=params.n_max {
        // weights below double precision cannot move the sum
        if weight > 1e-18 {
            sum += weight * fock_unit_gain_fidelity(n_photon, params.delta)?;
        }
        weight *= params.lambda;
    }
    let fidelity = FidelityResult::new(
        sum,
        Method::Polygauss,
        ProtocolParams::FockEnsemble(*params),
    )?;
    Ok(EnsembleSum {
        fidelity,
        tail_bound,
    })
}

/// Closed form for the full (untruncated) geometric-ensemble fidelity at
/// unit gain:
/// `(1 - lambda) / sqrt((1 + delta)^2 - 2 lambda (1 + delta^2) + lambda^2 (1 - delta)^2)`.
pub fn fock_ensemble_closed_form(lambda: f64, delta: f64) -> f64 {
    let d = delta;
    (1.0 - lambda)
        / ((1.0 + d) * (1.0 + d) - 2.0 * lambda * (1.0 + d * d)
            + lambda * lambda * (1.0 - d) * (1.0 - d))
            .sqrt()
}
