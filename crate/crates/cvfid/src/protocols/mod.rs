//! Teleportation and quantum-memory pipelines, their closed-form fidelities
//! and optimal feedback gains, and a scalar gain optimizer.

pub mod memory;
pub mod optimize;
pub mod params;
pub mod teleport;

pub use memory::{memory_fidelity_analytic, memory_pipeline, optimal_gain_memory};
pub use optimize::{optimize_gain, DEFAULT_GAIN_BRACKET};
pub use params::{
    FidelityResult, FockEnsembleParams, FockParams, MemoryParams, Method, ProtocolParams,
    TeleportationParams,
};
pub use teleport::{
    epr_covariance, optimal_gain_teleport, teleport_fidelity_analytic, teleport_pipeline,
};
