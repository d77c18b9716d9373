//! Thermal state of the spin-1 Heisenberg dimer with exchange anisotropy,
//! single-ion anisotropy and a longitudinal field, and four quantum-resource
//! quantifiers evaluated on it: l1-norm coherence, relative entropy of
//! coherence, negativity and entropic-uncertainty steering.
//!
//! Every closed-form expression has an independent numeric counterpart
//! (Jacobi diagonalization, projector expectations) and the two are compared
//! by [`verify::run_verification`] and on a random subsample of every sweep.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod steering;
pub mod sweep;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{EigenSystem, SymMatrix};
pub use measures::{classify_phase, Phase, ResourceReport};
pub use model::{analytic_spectrum, build_hamiltonian, AnalyticSpectrum, ModelParams};
pub use steering::{Axis, SteeringBreakdown};
pub use sweep::{run_sweep, write_table, GridResult, GridSpec, TableFormat};
pub use thermal::{gibbs_closed_form, gibbs_oracle, ground_state, Temperature, ThermalState};

/// Crate version recorded in sweep metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Version of the JSON documents emitted by the CLI and sweeps.
pub const SCHEMA_VERSION: u32 = 1;
