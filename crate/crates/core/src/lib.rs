//! Translation-invariant Gaussian states and operations as matrix fields on a
//! discretized Brillouin zone, with symmetry classification, topological
//! invariants, explicit deformations and disentanglers.

pub mod bz_grid;
pub mod deform;
pub mod disentangle;
pub mod error;
pub mod gaussian_core;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod models;
pub mod parallel;
pub mod symmetry;
pub mod tables;

pub use bz_grid::{make_grid, BZGrid};
pub use error::{Error, Result};
pub use gaussian_core::{MatrixField, Particle, Kind, RealSpaceCouplings, Role, Term};
pub use symmetry::{AZClass, SymmetrySpec};
