//! Fidelities of Gaussian transformations of unknown continuous-variable
//! quantum states.
//!
//! The toolkit evaluates state-to-state fidelities for teleportation and
//! quantum-memory protocols acting on inputs drawn from a distribution, via
//! three mutually cross-checking routes:
//!
//! - a covariance-matrix pipeline over hybrid quantum/classical Gaussian
//!   states ([`state`], [`measurement`], [`protocols`]),
//! - an exact polynomial-times-Gaussian Wigner calculus for non-Gaussian
//!   (Fock) inputs ([`polygauss`]),
//! - a seeded Monte-Carlo estimator sampling classical displacements and
//!   measurement outcomes explicitly ([`mc`]).
//!
//! Conventions: quadratures are dimensionless with vacuum covariance equal
//! to the identity, `gamma_ij = 2 Re<dy_i dy_j>`; a classical displacement
//! pair of variance parameter `v_c` has covariance `v_c I` (`v_c = 2 Var`).
//! All operations are pure functions over value-semantic states and are safe
//! to call concurrently.

pub mod error;
pub mod fidelity;
pub mod labels;
pub mod linmap;
pub mod measurement;
pub mod pinv;
pub mod polygauss;
pub mod protocols;
pub mod state;

pub use error::{CvfidError, Result};
pub use fidelity::{fidelity_vs_coherent, fidelity_vs_vacuum};
pub use labels::{PairRole, VariableKind, VariableLabel};
pub use linmap::LinearMap;
pub use measurement::{average_over_outcomes, condition_on_measurement, MeasurementSpec};
pub use pinv::pseudo_inverse;
pub use state::GaussianState;
