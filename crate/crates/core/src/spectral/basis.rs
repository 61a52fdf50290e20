use std::f64::consts::PI;

use super::Domain;
use crate::error::{Error, Result};

/// `w_m(x)` of the 1D Neumann cosine family on `[0, l]`.
pub fn axis_value(m: usize, l: f64, x: f64) -> f64 {
    if m == 0 {
        1.0 / l.sqrt()
    } else {
        (2.0 / l).sqrt() * (m as f64 * PI * x / l).cos()
    }
}

pub fn axis_derivative(m: usize, l: f64, x: f64) -> f64 {
    if m == 0 {
        0.0
    } else {
        let w = m as f64 * PI / l;
        -(2.0 / l).sqrt() * w * (w * x).sin()
    }
}

pub fn axis_second_derivative(m: usize, l: f64, x: f64) -> f64 {
    let w = m as f64 * PI / l;
    -w * w * axis_value(m, l, x)
}

/// Tensor-product cosine basis with `modes[0] * modes[1]` functions.
///
/// Flat index is `mx * modes[1] + my`; index 0 is the constant mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBasis {
    domain: Domain,
    modes: [usize; 2],
}

impl SpectralBasis {
    /// `modes_per_dim` modes along each physical axis.
    pub fn new(domain: Domain, modes_per_dim: usize) -> Result<Self> {
        let modes = match domain {
            Domain::Interval { .. } => [modes_per_dim, 1],
            Domain::Rectangle { .. } => [modes_per_dim, modes_per_dim],
        };
        Self::with_modes(domain, modes)
    }

    pub fn with_modes(domain: Domain, modes: [usize; 2]) -> Result<Self> {
        domain.validate()?;
        if modes[0] == 0 || modes[1] == 0 {
            return Err(Error::InvalidDomain("mode count must be at least 1".into()));
        }
        if domain.dim() == 1 && modes[1] != 1 {
            return Err(Error::InvalidDomain(
                "an interval basis has exactly one y mode".into(),
            ));
        }
        Ok(SpectralBasis { domain, modes })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn modes(&self) -> [usize; 2] {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.modes[0] * self.modes[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, mx: usize, my: usize) -> usize {
        mx * self.modes[1] + my
    }

    pub fn mode_pair(&self, i: usize) -> (usize, usize) {
        (i / self.modes[1], i % self.modes[1])
    }

    pub fn axis_eigenvalue(&self, axis: usize, m: usize) -> f64 {
        let l = self.domain.lengths()[axis];
        let w = m as f64 * PI / l;
        w * w
    }

    pub fn eigenvalue(&self, i: usize) -> f64 {
        let (mx, my) = self.mode_pair(i);
        self.axis_eigenvalue(0, mx) + self.axis_eigenvalue(1, my)
    }

    /// Eigenvalues in flat index order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.eigenvalue(i)).collect()
    }

    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut ev = self.eigenvalues();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalue(self.len() - 1)
    }

    /// Direct evaluation of `w_i` at a point (the `y` coordinate is ignored in 1D).
    pub fn eval(&self, i: usize, x: f64, y: f64) -> f64 {
        let (mx, my) = self.mode_pair(i);
        let [lx, ly] = self.domain.lengths();
        let wy = if self.domain.dim() == 1 {
            1.0
        } else {
            axis_value(my, ly, y)
        };
        axis_value(mx, lx, x) * wy
    }

    pub fn eval_gradient(&self, i: usize, x: f64, y: f64) -> [f64; 2] {
        let (mx, my) = self.mode_pair(i);
        let [lx, ly] = self.domain.lengths();
        if self.domain.dim() == 1 {
            return [axis_derivative(mx, lx, x), 0.0];
        }
        [
            axis_derivative(mx, lx, x) * axis_value(my, ly, y),
            axis_value(mx, lx, x) * axis_derivative(my, ly, y),
        ]
    }

    pub fn same_shape(&self, other: &SpectralBasis) -> bool {
        self == other
    }
}

/// Convenience constructor mirroring [`SpectralBasis::new`].
pub fn build_basis(domain: Domain, modes_per_dim: usize) -> Result<SpectralBasis> {
    SpectralBasis::new(domain, modes_per_dim)
}
