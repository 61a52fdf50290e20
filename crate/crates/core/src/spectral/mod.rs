//! Neumann-Laplacian eigenbasis on intervals and rectangles.
//!
//! Fields are stored either as coefficient vectors in the cosine basis
//! ([`FieldCoeffs`]) or as nodal values on a midpoint quadrature grid
//! ([`GridField`]). A one-dimensional problem is represented as a
//! rectangle whose `y` axis is degenerate: one mode, one node, unit
//! weight and no boundary, so every operator is written once for both
//! cases.

mod basis;
mod discretization;
mod field;
mod ops;
mod transform;

pub use basis::{
    axis_derivative, axis_second_derivative, axis_value, build_basis, SpectralBasis,
};
pub use discretization::Discretization;
pub use field::{FieldCoeffs, GridField, QuadratureGrid};
pub use ops::{
    boundary_mass_matrix, inner_product, inverse_neumann_laplacian, neumann_laplacian,
    BoundaryOperator, DenseMatrix, InnerProduct, ZERO_MEAN_TOLERANCE,
};
pub use transform::Transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Computational domain `[0, lx]` or `[0, lx] x [0, ly]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn interval(length: f64) -> Result<Self> {
        let d = Domain::Interval { length };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        let d = Domain::Rectangle { lx, ly };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, l) in self.named_lengths() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidDomain(format!(
                    "{name} must be positive and finite, got {l}"
                )));
            }
        }
        Ok(())
    }

    fn named_lengths(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Domain::Interval { length } => vec![("length", length)],
            Domain::Rectangle { lx, ly } => vec![("lx", lx), ("ly", ly)],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Axis lengths; the degenerate `y` axis of an interval has length 1.
    pub fn lengths(&self) -> [f64; 2] {
        match *self {
            Domain::Interval { length } => [length, 1.0],
            Domain::Rectangle { lx, ly } => [lx, ly],
        }
    }

    pub fn measure(&self) -> f64 {
        let [lx, ly] = self.lengths();
        lx * ly
    }

    /// Hausdorff measure of the boundary (point count in 1D).
    pub fn boundary_measure(&self) -> f64 {
        match *self {
            Domain::Interval { .. } => 2.0,
            Domain::Rectangle { lx, ly } => 2.0 * (lx + ly),
        }
    }

    pub(crate) fn is_degenerate(&self, axis: usize) -> bool {
        axis == 1 && self.dim() == 1
    }
}
