//! Resonances of a 2x2 semiclassical Schrodinger system whose diabatic
//! potentials cross above a well: Bohr-Sommerfeld and width asymptotics
//! alongside direct numerical oracles.

mod error;

pub mod actions;
pub mod harness;
pub mod microlocal;
pub mod model;
pub mod oracle;
pub mod semiclassics;

pub use error::{Error, Result};
