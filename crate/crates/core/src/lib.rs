//! Boundary sections of solutions to the Dirichlet Monge–Ampère problem
//! `det D^2 u = f` in convex planar domains.

pub mod barriers;
pub mod error;
pub mod geometry;
pub mod problem;
pub mod section;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
