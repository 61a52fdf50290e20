use super::{Domain, SpectralBasis};
use crate::error::{Error, Result};

/// Tensor midpoint rule: `x_q = (q + 1/2) L / N` with weight `L / N`.
///
/// The degenerate `y` axis of an interval has a single node of weight 1.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    domain: Domain,
    nodes: [usize; 2],
    coords: [Vec<f64>; 2],
    weights: [Vec<f64>; 2],
}

impl QuadratureGrid {
    pub fn new(domain: Domain, nodes_per_dim: usize) -> Result<Self> {
        let nodes = match domain {
            Domain::Interval { .. } => [nodes_per_dim, 1],
            Domain::Rectangle { .. } => [nodes_per_dim, nodes_per_dim],
        };
        Self::with_nodes(domain, nodes)
    }

    pub fn with_nodes(domain: Domain, nodes: [usize; 2]) -> Result<Self> {
        domain.validate()?;
        if nodes[0] == 0 || nodes[1] == 0 {
            return Err(Error::DimensionMismatch("grid needs at least one node".into()));
        }
        if domain.dim() == 1 && nodes[1] != 1 {
            return Err(Error::DimensionMismatch(
                "an interval grid has exactly one y node".into(),
            ));
        }
        let lengths = domain.lengths();
        let mut coords: [Vec<f64>; 2] = Default::default();
        let mut weights: [Vec<f64>; 2] = Default::default();
        for a in 0..2 {
            if domain.is_degenerate(a) {
                coords[a] = vec![0.0];
                weights[a] = vec![1.0];
                continue;
            }
            let n = nodes[a];
            let h = lengths[a] / n as f64;
            coords[a] = (0..n).map(|q| (q as f64 + 0.5) * h).collect();
            weights[a] = vec![h; n];
        }
        Ok(QuadratureGrid {
            domain,
            nodes,
            coords,
            weights,
        })
    }

    /// Default grid for a basis: twice the mode count per axis, which
    /// integrates quartic nonlinearities of resolved fields exactly.
    pub fn for_basis(basis: &SpectralBasis) -> Self {
        let m = basis.modes();
        let pick = |k: usize| (2 * k).max(dealiased_nodes(k));
        let nodes = if basis.domain().dim() == 1 {
            [pick(m[0]), 1]
        } else {
            [pick(m[0]), pick(m[1])]
        };
        Self::with_nodes(*basis.domain(), nodes).expect("basis domain already validated")
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn nodes(&self) -> [usize; 2] {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, axis: usize) -> &[f64] {
        &self.coords[axis]
    }

    pub fn weights(&self, axis: usize) -> &[f64] {
        &self.weights[axis]
    }

    /// Physical coordinates of flat node `i`.
    pub fn point(&self, i: usize) -> (f64, f64) {
        let (qx, qy) = (i / self.nodes[1], i % self.nodes[1]);
        (self.coords[0][qx], self.coords[1][qy])
    }

    pub fn weight(&self, i: usize) -> f64 {
        let (qx, qy) = (i / self.nodes[1], i % self.nodes[1]);
        self.weights[0][qx] * self.weights[1][qy]
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> GridField {
        let values = (0..self.len())
            .map(|i| {
                let (x, y) = self.point(i);
                f(x, y)
            })
            .collect();
        GridField {
            nodes: self.nodes,
            values,
        }
    }

    pub fn integrate(&self, f: &GridField) -> f64 {
        debug_assert_eq!(f.nodes, self.nodes);
        self.integrate_values(&f.values)
    }

    /// Fixed-order weighted sum, so results are bit-reproducible.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        let ny = self.nodes[1];
        let mut total = 0.0;
        for (qx, wx) in self.weights[0].iter().enumerate() {
            let row = &values[qx * ny..(qx + 1) * ny];
            let s: f64 = row.iter().zip(&self.weights[1]).map(|(v, wy)| v * wy).sum();
            total += wx * s;
        }
        total
    }

    /// Discrete `L^p` norm by nodal quadrature.
    pub fn lp_norm(&self, f: &GridField, p: f64) -> f64 {
        if p.is_infinite() {
            return f.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        }
        let s: Vec<f64> = f.values.iter().map(|v| v.abs().powf(p)).collect();
        self.integrate_values(&s).powf(1.0 / p)
    }

    pub fn zeros(&self) -> GridField {
        GridField::zeros(self.nodes)
    }
}

/// Minimum node count of the dealiasing contract for `k` modes.
pub(crate) fn dealiased_nodes(k: usize) -> usize {
    (3 * k).div_ceil(2) + 1
}

/// Nodal values on a [`QuadratureGrid`], flat index `qx * ny + qy`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub nodes: [usize; 2],
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(nodes: [usize; 2]) -> Self {
        GridField {
            nodes,
            values: vec![0.0; nodes[0] * nodes[1]],
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            nodes: self.nodes,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        debug_assert_eq!(self.nodes, other.nodes);
        GridField {
            nodes: self.nodes,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Coefficients of a field in a [`SpectralBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldCoeffs {
    pub basis: SpectralBasis,
    pub coeffs: Vec<f64>,
}

impl FieldCoeffs {
    pub fn zeros(basis: &SpectralBasis) -> Self {
        FieldCoeffs {
            basis: basis.clone(),
            coeffs: vec![0.0; basis.len()],
        }
    }

    pub fn from_vec(basis: &SpectralBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient {i}")));
        }
        Ok(FieldCoeffs {
            basis: basis.clone(),
            coeffs,
        })
    }

    /// The constant function `value`.
    pub fn constant(basis: &SpectralBasis, value: f64) -> Self {
        let mut c = Self::zeros(basis);
        c.coeffs[0] = value * basis.domain().measure().sqrt();
        c
    }

    /// Unit coefficient on mode `i`.
    pub fn unit(basis: &SpectralBasis, i: usize) -> Self {
        let mut c = Self::zeros(basis);
        c.coeffs[i] = 1.0;
        c
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0] / self.basis.domain().measure().sqrt()
    }

    pub fn integral(&self) -> f64 {
        self.coeffs[0] * self.basis.domain().measure().sqrt()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| c * self.basis.eval(i, x, y))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub(crate) fn check_same_basis(&self, other: &FieldCoeffs) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch(format!(
                "basis {:?} vs {:?}",
                self.basis.modes(),
                other.basis.modes()
            )));
        }
        Ok(())
    }

    pub fn axpy(&mut self, a: f64, x: &FieldCoeffs) {
        debug_assert_eq!(self.basis, x.basis);
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * v;
        }
    }

    pub fn scaled(&self, a: f64) -> FieldCoeffs {
        FieldCoeffs {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }
}
