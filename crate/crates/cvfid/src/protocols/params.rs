//! Protocol parameter types and the tagged fidelity result.

use crate::error::{CvfidError, Result};
use serde::{Deserialize, Serialize};

/// Heisenberg slack allowed on `n^2 - k^2 >= 1`.
const HEISENBERG_TOL: f64 = 1e-12;

/// Teleportation channel and input-ensemble parameters. `n` is the common
/// diagonal of the entangled-channel covariance, `k` the cross correlation
/// (`n^2 - k^2 >= 1`), `v_c` the variance parameter of the classical input
/// distribution and `g` the feedback gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportationParams {
    pub n: f64,
    pub k: f64,
    pub v_c: f64,
    pub g: f64,
}

impl TeleportationParams {
    pub fn new(n: f64, k: f64, v_c: f64, g: f64) -> Result<Self> {
        if !(n >= 1.0) {
            return Err(CvfidError::invalid_parameter(
                "n",
                format!("channel variance must satisfy n >= 1, got {n}"),
            ));
        }
        if !(k.abs() < n + HEISENBERG_TOL) {
            return Err(CvfidError::invalid_parameter(
                "k",
                format!("channel correlation must satisfy |k| < n, got k={k}, n={n}"),
            ));
        }
        if n * n - k * k < 1.0 - HEISENBERG_TOL {
            return Err(CvfidError::invalid_parameter(
                "k",
                format!("n^2 - k^2 < 1 violates the Heisenberg constraint (n={n}, k={k})"),
            ));
        }
        if !(v_c >= 0.0) {
            return Err(CvfidError::invalid_parameter(
                "v_c",
                format!("classical variance must be >= 0, got {v_c}"),
            ));
        }
        if !g.is_finite() {
            return Err(CvfidError::invalid_parameter("g", "gain must be finite"));
        }
        Ok(TeleportationParams { n, k, v_c, g })
    }

    /// Same channel and ensemble with the optimal feedback gain.
    pub fn with_optimal_gain(n: f64, k: f64, v_c: f64) -> Result<Self> {
        let mut p = TeleportationParams::new(n, k, v_c, 0.0)?;
        p.g = super::teleport::optimal_gain_teleport(n, k, v_c);
        Ok(p)
    }

    /// EPR variance of the channel, `Delta = n - k = Var(x_1 - x_2)`.
    pub fn epr_variance(&self) -> f64 {
        self.n - self.k
    }
}

/// Memory-protocol parameters: integrated interaction strength `kappa`,
/// initial atomic squeezing `r >= 1` (atomic covariance `diag(1/r, r)`),
/// classical variance `v_c` and feedback gain `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub kappa: f64,
    pub r: f64,
    pub v_c: f64,
    pub g: f64,
}

impl MemoryParams {
    pub fn new(kappa: f64, r: f64, v_c: f64, g: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(CvfidError::invalid_parameter(
                "kappa",
                format!("interaction strength must be >= 0, got {kappa}"),
            ));
        }
        if !(r >= 1.0) {
            return Err(CvfidError::invalid_parameter(
                "r",
                format!("squeezing parameter must be >= 1, got {r}"),
            ));
        }
        if !(v_c >= 0.0) {
            return Err(CvfidError::invalid_parameter(
                "v_c",
                format!("classical variance must be >= 0, got {v_c}"),
            ));
        }
        if !g.is_finite() {
            return Err(CvfidError::invalid_parameter("g", "gain must be finite"));
        }
        Ok(MemoryParams { kappa, r, v_c, g })
    }

    pub fn with_optimal_gain(kappa: f64, r: f64, v_c: f64) -> Result<Self> {
        let mut p = MemoryParams::new(kappa, r, v_c, 0.0)?;
        p.g = super::memory::optimal_gain_memory(kappa, v_c, r);
        Ok(p)
    }
}

/// Fock-state teleportation parameters: photon number, channel, gain, and an
/// optional classical displacement variance for the displaced-input variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockParams {
    pub n_photon: u32,
    pub n: f64,
    pub k: f64,
    pub g: f64,
    pub v_c: f64,
}

/// Weighted Fock ensemble: `p_N = (1 - lambda) lambda^N` with
/// `lambda = exp(-1/N_bar)`, teleported through a channel of EPR variance
/// `delta` at unit gain, truncated at `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockEnsembleParams {
    pub lambda: f64,
    pub delta: f64,
    pub n_max: u32,
}

impl FockEnsembleParams {
    pub fn new(lambda: f64, delta: f64, n_max: u32) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(CvfidError::invalid_parameter(
                "lambda",
                format!("geometric weight must lie in [0, 1), got {lambda}"),
            ));
        }
        if !(delta > 0.0) {
            return Err(CvfidError::invalid_parameter(
                "delta",
                format!("EPR variance must be > 0, got {delta}"),
            ));
        }
        if n_max < 1 {
            return Err(CvfidError::invalid_parameter("n_max", "must be >= 1"));
        }
        Ok(FockEnsembleParams { lambda, delta, n_max })
    }

    pub fn from_mean_photon_number(n_bar: f64, delta: f64, n_max: u32) -> Result<Self> {
        if !(n_bar > 0.0) {
            return Err(CvfidError::invalid_parameter(
                "n_bar",
                format!("mean photon number must be > 0, got {n_bar}"),
            ));
        }
        FockEnsembleParams::new((-1.0 / n_bar).exp(), delta, n_max)
    }

    pub fn mean_photon_number(&self) -> f64 {
        -1.0 / self.lambda.ln()
    }

    /// Upper bound on the weight of the truncated tail.
    pub fn tail_bound(&self) -> f64 {
        self.lambda.powi(self.n_max as i32 + 1) / (1.0 - self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    CovariancePipeline,
    Polygauss,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::CovariancePipeline => "covariance-pipeline",
            Method::Polygauss => "polygauss",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolParams {
    Teleport(TeleportationParams),
    Memory(MemoryParams),
    Fock(FockParams),
    FockEnsemble(FockEnsembleParams),
}

/// A fidelity value tagged with the route that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub value: f64,
    pub method: Method,
    pub params: ProtocolParams,
    /// Standard error of the estimate; Monte-Carlo only.
    pub stderr: Option<f64>,
}

impl FidelityResult {
    pub fn new(value: f64, method: Method, params: ProtocolParams) -> Result<Self> {
        if !value.is_finite() {
            return Err(CvfidError::NonFinite {
                context: "fidelity value",
            });
        }
        if !(0.0..=1.0 + 1e-9).contains(&value) {
            return Err(CvfidError::invalid_parameter(
                "fidelity",
                format!("value {value} outside [0, 1]"),
            ));
        }
        Ok(FidelityResult {
            value,
            method,
            params,
            stderr: None,
        })
    }

    pub fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_constraint_enforced() {
        assert!(TeleportationParams::new(2.0, 3.0_f64.sqrt(), 0.0, 0.0).is_ok());
        assert!(TeleportationParams::new(2.0, 1.9, 0.0, 0.0).is_err());
        assert!(TeleportationParams::new(0.9, 0.0, 0.0, 0.0).is_err());
        assert!(TeleportationParams::new(1.0, 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn memory_params_validated() {
        assert!(MemoryParams::new(1.0, 1.0, 0.0, 0.5).is_ok());
        assert!(MemoryParams::new(-0.1, 1.0, 0.0, 0.0).is_err());
        assert!(MemoryParams::new(1.0, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn ensemble_lambda_from_mean_photon_number() {
        let p = FockEnsembleParams::from_mean_photon_number(1.0, 0.1, 60).unwrap();
        assert!((p.lambda - (-1.0_f64).exp()).abs() < 1e-15);
        assert!((p.mean_photon_number() - 1.0).abs() < 1e-12);
        assert!(FockEnsembleParams::new(1.0, 0.1, 10).is_err());
    }

    #[test]
    fn fidelity_result_range_checked() {
        let params = ProtocolParams::Teleport(TeleportationParams::new(1.0, 0.0, 0.0, 0.0).unwrap());
        assert!(FidelityResult::new(0.5, Method::Analytic, params.clone()).is_ok());
        assert!(FidelityResult::new(1.2, Method::Analytic, params.clone()).is_err());
        assert!(FidelityResult::new(-0.1, Method::Analytic, params).is_err());
    }
}
