//! Distribution-free robustness certificates for the set of variational
//! generalized Nash equilibria of quadratic aggregative games whose coupling
//! constraints are built from sampled uncertainty.
//!
//! The pipeline is: assemble the game ([`game`]), draw scenarios
//! ([`scenario`]), solve the coupling-free Nash problem for the equilibrium
//! invariants ([`equilibrium`]), count support samples against the pooled
//! feasible set ([`scenario::support`]) and turn that count into a violation
//! bound ([`scenario::epsilon`]). [`validation`] checks the bound empirically.

pub mod config;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod scenario;
pub mod selftest;
pub mod svg;
pub mod tolerance;
pub mod validation;

pub use error::{GneError, Result};
pub use game::{AggregativeGame, MonotonicityVerdict, PlayerSpec};
pub use linalg::Matrix;
pub use tolerance::ToleranceSet;

/// Version string embedded in every output artifact.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
