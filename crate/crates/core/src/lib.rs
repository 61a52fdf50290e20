//! Spectral Galerkin solver for a Cahn–Hilliard–Darcy system coupled to a
//! nutrient with chemotaxis, active transport and Robin boundary exchange.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
