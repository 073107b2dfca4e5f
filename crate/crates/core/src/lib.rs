//! Quantum jump statistics of up to three dipole-interacting three-level
//! atoms in V or D configuration.
//!
//! The crate computes the transition rates p_ij between intensity periods
//! from the Liouvillian of the atom array, either through the permutation
//! symmetric sectors or in the full 729-dimensional space, and checks them
//! against closed forms and against quantum trajectory simulations.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod rates;
pub mod symmetry;
pub mod trajectories;

pub use error::{Error, Result};
pub use model::{coupling_constant, params_from_geometry, Geometry, LevelScheme, SystemParams};
