use super::{BoundaryOperator, QuadratureGrid, SpectralBasis, Transform};
use super::Domain;
use crate::error::Result;

/// Everything a simulation needs from the spectral layer: the working
/// basis and its dealiased transform, a pressure basis carrying one mode
/// per grid node, and the boundary operator.
///
/// The pressure basis is large enough that the Poisson problem for `p`
/// driven by products of resolved fields is solved without truncation.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub basis: SpectralBasis,
    pub transform: Transform,
    pub pressure_basis: SpectralBasis,
    pub pressure: Transform,
    pub boundary: BoundaryOperator,
    pad_index: Vec<usize>,
}

impl Discretization {
    pub fn new(domain: Domain, modes_per_dim: usize) -> Result<Self> {
        let basis = SpectralBasis::new(domain, modes_per_dim)?;
        let grid = QuadratureGrid::for_basis(&basis);
        Self::with_grid(&basis, &grid)
    }

    pub fn with_grid(basis: &SpectralBasis, grid: &QuadratureGrid) -> Result<Self> {
        let transform = Transform::new(basis, grid)?;
        let pressure_basis = SpectralBasis::with_modes(*basis.domain(), grid.nodes())?;
        let pressure = Transform::new_resolving(&pressure_basis, grid)?;
        let pad_index = (0..basis.len())
            .map(|i| {
                let (mx, my) = basis.mode_pair(i);
                pressure_basis.index(mx, my)
            })
            .collect();
        Ok(Discretization {
            basis: basis.clone(),
            transform,
            pressure_basis,
            pressure,
            boundary: BoundaryOperator::new(basis),
            pad_index,
        })
    }

    pub fn domain(&self) -> &Domain {
        self.basis.domain()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        self.transform.grid()
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()[0]
    }

    /// Embed working-basis coefficients into the pressure basis.
    pub fn pad(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.pressure_basis.len()];
        for (i, &p) in self.pad_index.iter().enumerate() {
            out[p] = c[i];
        }
        out
    }

    /// Keep only the working-basis modes of a pressure-basis vector.
    pub fn truncate(&self, c: &[f64]) -> Vec<f64> {
        self.pad_index.iter().map(|&p| c[p]).collect()
    }
}
