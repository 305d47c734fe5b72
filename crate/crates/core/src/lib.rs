//! Maslov-type intersection indices for paths of Lagrangian subspaces and
//! their use in Morse-index formulas for periodic brake orbits.

pub mod brake;
pub mod error;
pub mod hamiltonian;
pub mod index;
pub mod io;
pub mod linalg;
pub mod models;
pub mod symplectic;

pub use error::{Error, Result};
