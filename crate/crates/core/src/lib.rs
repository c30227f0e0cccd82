//! Dissipative nonlinear Jaynes-Cummings model of a charge qubit coupled to
//! a Kerr-nonlinear nanomechanical resonator, restricted to the
//! single-excitation manifold `{|e,0>, |g,1>, |g,0>}`.
//!
//! Two independent solvers are provided: [`spectral`] expands the state
//! over the nine eigenoperators of the Liouvillian and evolves it in closed
//! form; [`oracle`] integrates the same master equation with fixed-step RK4.
//! [`experiments`] binds both into figure presets, sweeps and exports.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod spectral;

pub use error::{NjcError, Result};
pub use model::ModelParams;
