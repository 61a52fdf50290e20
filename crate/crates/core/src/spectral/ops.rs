use super::basis::axis_value;
use super::{FieldCoeffs, SpectralBasis};
use crate::error::{Error, Result};

/// Constant-mode coefficients below this magnitude are treated as zero by
/// [`inverse_neumann_laplacian`].
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-10;

/// Mean-zero solution of `-Δu = f` with homogeneous Neumann data.
pub fn inverse_neumann_laplacian(c: &FieldCoeffs) -> Result<FieldCoeffs> {
    let c0 = c.coeffs[0];
    if c0.abs() >= ZERO_MEAN_TOLERANCE {
        return Err(Error::ZeroMeanViolation {
            value: c0,
            tolerance: ZERO_MEAN_TOLERANCE,
        });
    }
    let mut out = FieldCoeffs::zeros(&c.basis);
    for i in 1..c.coeffs.len() {
        out.coeffs[i] = c.coeffs[i] / c.basis.eigenvalue(i);
    }
    Ok(out)
}

/// `-Δ` in the eigenbasis: multiplication by `λ_i`.
pub fn neumann_laplacian(c: &FieldCoeffs) -> FieldCoeffs {
    let mut out = c.clone();
    for (i, v) in out.coeffs.iter_mut().enumerate() {
        *v *= c.basis.eigenvalue(i);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerProduct {
    L2,
    H1Seminorm,
}

pub fn inner_product(c1: &FieldCoeffs, c2: &FieldCoeffs, kind: InnerProduct) -> Result<f64> {
    c1.check_same_basis(c2)?;
    let b = &c1.basis;
    Ok(c1
        .coeffs
        .iter()
        .zip(&c2.coeffs)
        .enumerate()
        .map(|(i, (a, c))| match kind {
            InnerProduct::L2 => a * c,
            InnerProduct::H1Seminorm => b.eigenvalue(i) * a * c,
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }
}

/// Closed-form boundary integrals of the basis.
///
/// The mass matrix `∫_∂Ω w_i w_j` splits into a sum of per-axis end-point
/// traces times the identity on the other axis, since the cosine family is
/// orthonormal along each edge.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    modes: [usize; 2],
    axis_mass: [Vec<f64>; 2],
    traces: Vec<f64>,
}

impl BoundaryOperator {
    pub fn new(basis: &SpectralBasis) -> Self {
        let modes = basis.modes();
        let lengths = basis.domain().lengths();
        let mut axis_mass: [Vec<f64>; 2] = Default::default();
        let mut ends: [Vec<f64>; 2] = Default::default();
        for a in 0..2 {
            let k = modes[a];
            if basis.domain().is_degenerate(a) {
                axis_mass[a] = vec![0.0];
                ends[a] = vec![0.0];
                continue;
            }
            let l = lengths[a];
            let w0: Vec<f64> = (0..k).map(|m| axis_value(m, l, 0.0)).collect();
            let wl: Vec<f64> = (0..k).map(|m| axis_value(m, l, l)).collect();
            axis_mass[a] = (0..k * k)
                .map(|ij| {
                    let (i, j) = (ij / k, ij % k);
                    w0[i] * w0[j] + wl[i] * wl[j]
                })
                .collect();
            ends[a] = w0.iter().zip(&wl).map(|(a, b)| a + b).collect();
        }
        // ∫ over the full axis of a single cosine mode.
        let axis_integral = |a: usize, m: usize| -> f64 {
            if m == 0 {
                if basis.domain().is_degenerate(a) {
                    1.0
                } else {
                    lengths[a].sqrt()
                }
            } else {
                0.0
            }
        };
        let traces = (0..basis.len())
            .map(|i| {
                let (mx, my) = basis.mode_pair(i);
                ends[0][mx] * axis_integral(1, my) + axis_integral(0, mx) * ends[1][my]
            })
            .collect();
        BoundaryOperator {
            modes,
            axis_mass,
            traces,
        }
    }

    /// `M_∂Ω c`.
    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        let [kx, ky] = self.modes;
        let mut out = vec![0.0; kx * ky];
        for mx in 0..kx {
            for my in 0..ky {
                let mut s = 0.0;
                for m2 in 0..kx {
                    s += self.axis_mass[0][mx * kx + m2] * c[m2 * ky + my];
                }
                for m2 in 0..ky {
                    s += self.axis_mass[1][my * ky + m2] * c[mx * ky + m2];
                }
                out[mx * ky + my] = s;
            }
        }
        out
    }

    /// `cᵀ M_∂Ω d`.
    pub fn bilinear(&self, c: &[f64], d: &[f64]) -> f64 {
        self.apply(d).iter().zip(c).map(|(a, b)| a * b).sum()
    }

    /// `s_j = ∫_∂Ω w_j`.
    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    /// `∫_∂Ω u` for `u = Σ c_j w_j`.
    pub fn integral(&self, c: &[f64]) -> f64 {
        self.traces.iter().zip(c).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.modes[0] * self.modes[1];
        let mut m = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            for (i, v) in self.apply(&e).into_iter().enumerate() {
                m.set(i, j, v);
            }
            e[j] = 0.0;
        }
        m
    }
}

pub fn boundary_mass_matrix(basis: &SpectralBasis) -> DenseMatrix {
    BoundaryOperator::new(basis).to_dense()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Domain, Transform};
    use std::f64::consts::PI;

    fn interval(k: usize) -> SpectralBasis {
        SpectralBasis::new(Domain::interval(1.0).unwrap(), k).unwrap()
    }

    #[test]
    fn inverse_laplacian_of_cosine() {
        let b = interval(4);
        let c = FieldCoeffs::unit(&b, 1);
        let u = inverse_neumann_laplacian(&c).unwrap();
        assert!((u.coeffs[1] - 1.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(u.coeffs[0], 0.0);
        let z = inverse_neumann_laplacian(&FieldCoeffs::zeros(&b)).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn inverse_laplacian_mean_zero_precondition() {
        let b = interval(3);
        let mut c = FieldCoeffs::zeros(&b);
        c.coeffs[0] = 0.5;
        assert!(matches!(
            inverse_neumann_laplacian(&c),
            Err(Error::ZeroMeanViolation { .. })
        ));
        c.coeffs[0] = 1e-12;
        assert_eq!(inverse_neumann_laplacian(&c).unwrap().coeffs[0], 0.0);
    }

    #[test]
    fn inverse_laplacian_two_sided() {
        let b = SpectralBasis::new(Domain::rectangle(1.0, 2.0).unwrap(), 6).unwrap();
        let mut c = FieldCoeffs::zeros(&b);
        for (i, v) in c.coeffs.iter_mut().enumerate().skip(1) {
            *v = ((i * 7919) % 13) as f64 / 13.0 - 0.5;
        }
        let back = neumann_laplacian(&inverse_neumann_laplacian(&c).unwrap());
        let fwd = inverse_neumann_laplacian(&neumann_laplacian(&c)).unwrap();
        for i in 0..b.len() {
            assert!((back.coeffs[i] - c.coeffs[i]).abs() < 1e-12);
            assert!((fwd.coeffs[i] - c.coeffs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_mass_unit_interval() {
        let m = boundary_mass_matrix(&interval(3));
        // Oracle: w_0 = 1, w_1 = √2 cos(πx), w_2 = √2 cos(2πx) at x = 0 and 1.
        let w = |i: usize, x: f64| if i == 0 { 1.0 } else { 2f64.sqrt() * (i as f64 * PI * x).cos() };
        for i in 0..3 {
            for j in 0..3 {
                let want = w(i, 0.0) * w(j, 0.0) + w(i, 1.0) * w(j, 1.0);
                assert!((m.get(i, j) - want).abs() < 1e-14);
            }
        }
        assert!((m.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((m.get(1, 1) - 4.0).abs() < 1e-14);
        assert!(m.get(0, 1).abs() < 1e-14);
        assert!((m.get(0, 2) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn boundary_mass_rectangle_matches_edge_quadrature() {
        let b = SpectralBasis::new(Domain::rectangle(1.5, 0.8).unwrap(), 4).unwrap();
        let m = boundary_mass_matrix(&b);
        assert_eq!(m.max_asymmetry(), 0.0);
        let n = 4000;
        let edge = |i: usize, j: usize| {
            let mut s = 0.0;
            for q in 0..n {
                let t = (q as f64 + 0.5) / n as f64;
                let (x, y) = (1.5 * t, 0.8 * t);
                s += 1.5 / n as f64 * (b.eval(i, x, 0.0) * b.eval(j, x, 0.0) + b.eval(i, x, 0.8) * b.eval(j, x, 0.8));
                s += 0.8 / n as f64 * (b.eval(i, 0.0, y) * b.eval(j, 0.0, y) + b.eval(i, 1.5, y) * b.eval(j, 1.5, y));
            }
            s
        };
        for i in 0..b.len() {
            for j in 0..b.len() {
                assert!((m.get(i, j) - edge(i, j)).abs() < 1e-6, "{i},{j}");
            }
        }
    }

    #[test]
    fn boundary_traces() {
        let b = SpectralBasis::new(Domain::rectangle(2.0, 1.0).unwrap(), 3).unwrap();
        let op = BoundaryOperator::new(&b);
        // The constant function integrates to the perimeter.
        let one = FieldCoeffs::constant(&b, 1.0);
        assert!((op.integral(&one.coeffs) - 6.0).abs() < 1e-14);
        let one_d = interval(3);
        let op = BoundaryOperator::new(&one_d);
        assert!((op.integral(&FieldCoeffs::constant(&one_d, 1.0).coeffs) - 2.0).abs() < 1e-15);
        assert_eq!(op.traces()[1], 0.0);
    }

    #[test]
    fn inner_products() {
        let b = interval(4);
        let e0 = FieldCoeffs::unit(&b, 0);
        assert_eq!(inner_product(&e0, &e0, InnerProduct::L2).unwrap(), 1.0);
        let t = Transform::for_basis(&b);
        let c = t.to_coeffs(&t.grid().sample(|x, _| (PI * x).cos())).unwrap();
        let h1 = inner_product(&c, &c, InnerProduct::H1Seminorm).unwrap();
        assert!((h1 - PI * PI / 2.0).abs() < 1e-12);
        let e1 = FieldCoeffs::unit(&b, 1);
        assert_eq!(inner_product(&e0, &e1, InnerProduct::L2).unwrap(), 0.0);
        let other = FieldCoeffs::unit(&interval(3), 0);
        assert!(inner_product(&e0, &other, InnerProduct::L2).is_err());
    }
}
