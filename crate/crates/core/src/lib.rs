//! Earthquakes on hyperbolic cone surfaces and the holonomy pairs of
//! anti-de Sitter manifolds with particles.

pub mod ads;
pub mod earthquake;
pub mod error;
pub mod files;
pub mod hyp;
pub mod numeric;
pub mod solver;
pub mod surface;
pub mod volume;
pub mod word;

pub use error::{Error, Result};
