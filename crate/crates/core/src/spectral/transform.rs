use super::basis::{axis_derivative, axis_second_derivative, axis_value};
use super::field::dealiased_nodes;
use super::{FieldCoeffs, GridField, QuadratureGrid, SpectralBasis};
use crate::error::{Error, Result};

/// Row-major dense table.
#[derive(Clone, Debug)]
struct Table {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Table {
    fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Table { rows, cols, data }
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Per-axis evaluation tables: node-by-mode values and derivatives, plus
/// mode-by-node analysis tables with quadrature weights folded in.
#[derive(Clone, Debug)]
struct AxisTables {
    val: Table,
    der: Table,
    der2: Table,
    ana_val: Table,
    ana_der: Table,
}

impl AxisTables {
    fn build(grid: &QuadratureGrid, axis: usize, modes: usize) -> Self {
        let x = grid.coords(axis);
        let w = grid.weights(axis);
        let n = x.len();
        if grid.domain().is_degenerate(axis) {
            let one = Table::from_fn(1, 1, |_, _| 1.0);
            let zero = Table::from_fn(1, 1, |_, _| 0.0);
            return AxisTables {
                val: one.clone(),
                der: zero.clone(),
                der2: zero.clone(),
                ana_val: one,
                ana_der: zero,
            };
        }
        let l = grid.domain().lengths()[axis];
        let val = Table::from_fn(n, modes, |q, m| axis_value(m, l, x[q]));
        let der = Table::from_fn(n, modes, |q, m| axis_derivative(m, l, x[q]));
        let der2 = Table::from_fn(n, modes, |q, m| axis_second_derivative(m, l, x[q]));
        let ana_val = Table::from_fn(modes, n, |m, q| w[q] * val.data[q * modes + m]);
        let ana_der = Table::from_fn(modes, n, |m, q| w[q] * der.data[q * modes + m]);
        AxisTables {
            val,
            der,
            der2,
            ana_val,
            ana_der,
        }
    }
}

/// Separable dense transforms between a basis and a quadrature grid.
///
/// Synthesis is exact evaluation of the cosine series at the nodes;
/// analysis is the discrete `L^2` projection `sum_q w_q f(x_q) w_j(x_q)`.
#[derive(Clone, Debug)]
pub struct Transform {
    basis: SpectralBasis,
    grid: QuadratureGrid,
    axes: [AxisTables; 2],
}

impl Transform {
    /// Enforces the dealiasing contract `N >= ceil(3k/2) + 1` per axis.
    pub fn new(basis: &SpectralBasis, grid: &QuadratureGrid) -> Result<Self> {
        Self::checked(basis, grid, dealiased_nodes)
    }

    /// Only requires the grid to resolve every mode (`N >= k`); used for
    /// bases that are never multiplied pointwise, such as the pressure.
    pub fn new_resolving(basis: &SpectralBasis, grid: &QuadratureGrid) -> Result<Self> {
        Self::checked(basis, grid, |k| k)
    }

    pub fn for_basis(basis: &SpectralBasis) -> Self {
        let grid = QuadratureGrid::for_basis(basis);
        Self::new(basis, &grid).expect("default grid satisfies the dealiasing contract")
    }

    fn checked(
        basis: &SpectralBasis,
        grid: &QuadratureGrid,
        required: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        if basis.domain() != grid.domain() {
            return Err(Error::DimensionMismatch("basis and grid domains differ".into()));
        }
        let modes = basis.modes();
        let nodes = grid.nodes();
        for a in 0..2 {
            if basis.domain().is_degenerate(a) {
                continue;
            }
            if nodes[a] < required(modes[a]) {
                return Err(Error::DimensionMismatch(format!(
                    "axis {a}: {} nodes cannot carry {} modes (need {})",
                    nodes[a],
                    modes[a],
                    required(modes[a])
                )));
            }
        }
        let axes = [
            AxisTables::build(grid, 0, modes[0]),
            AxisTables::build(grid, 1, modes[1]),
        ];
        Ok(Transform {
            basis: basis.clone(),
            grid: grid.clone(),
            axes,
        })
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn dim(&self) -> usize {
        self.basis.domain().dim()
    }

    fn check_coeffs(&self, c: &FieldCoeffs) -> Result<()> {
        if c.basis != self.basis {
            return Err(Error::DimensionMismatch(format!(
                "coefficients on {:?} modes, transform on {:?}",
                c.basis.modes(),
                self.basis.modes()
            )));
        }
        Ok(())
    }

    fn check_grid(&self, f: &GridField) -> Result<()> {
        if f.nodes != self.grid.nodes() {
            return Err(Error::DimensionMismatch(format!(
                "field on {:?} nodes, transform on {:?}",
                f.nodes,
                self.grid.nodes()
            )));
        }
        Ok(())
    }

    fn field(&self, values: Vec<f64>) -> GridField {
        GridField {
            nodes: self.grid.nodes(),
            values,
        }
    }

    pub fn to_grid(&self, c: &FieldCoeffs) -> Result<GridField> {
        self.check_coeffs(c)?;
        Ok(self.field(self.synth_raw(&c.coeffs)))
    }

    pub fn to_coeffs(&self, f: &GridField) -> Result<FieldCoeffs> {
        self.check_grid(f)?;
        Ok(FieldCoeffs {
            basis: self.basis.clone(),
            coeffs: self.analyze_raw(&f.values),
        })
    }

    /// Exact gradient of the series at the nodes, `[d/dx, d/dy]`.
    pub fn gradient_on_grid(&self, c: &FieldCoeffs) -> Result<[GridField; 2]> {
        self.check_coeffs(c)?;
        let [gx, gy] = self.gradient_raw(&c.coeffs);
        Ok([self.field(gx), self.field(gy)])
    }

    /// Weak divergence: coefficient `j` is `-∫ g · ∇w_j`.
    pub fn divergence_to_coeffs(&self, g: &[GridField; 2]) -> Result<FieldCoeffs> {
        self.check_grid(&g[0])?;
        self.check_grid(&g[1])?;
        Ok(FieldCoeffs {
            basis: self.basis.clone(),
            coeffs: self.divergence_raw(&g[0].values, &g[1].values),
        })
    }

    /// Second derivatives `[xx, xy, yy]` at the nodes.
    pub fn hessian_on_grid(&self, c: &FieldCoeffs) -> Result<[GridField; 3]> {
        self.check_coeffs(c)?;
        let [xx, xy, yy] = self.hessian_raw(&c.coeffs);
        Ok([self.field(xx), self.field(xy), self.field(yy)])
    }

    pub(crate) fn synth_raw(&self, c: &[f64]) -> Vec<f64> {
        apply(c, &self.axes[0].val, &self.axes[1].val)
    }

    pub(crate) fn analyze_raw(&self, f: &[f64]) -> Vec<f64> {
        apply(f, &self.axes[0].ana_val, &self.axes[1].ana_val)
    }

    pub(crate) fn gradient_raw(&self, c: &[f64]) -> [Vec<f64>; 2] {
        let gx = apply(c, &self.axes[0].der, &self.axes[1].val);
        let gy = if self.dim() == 1 {
            vec![0.0; gx.len()]
        } else {
            apply(c, &self.axes[0].val, &self.axes[1].der)
        };
        [gx, gy]
    }

    pub(crate) fn divergence_raw(&self, gx: &[f64], gy: &[f64]) -> Vec<f64> {
        let mut out = apply(gx, &self.axes[0].ana_der, &self.axes[1].ana_val);
        if self.dim() == 2 {
            let oy = apply(gy, &self.axes[0].ana_val, &self.axes[1].ana_der);
            for (o, y) in out.iter_mut().zip(oy) {
                *o += y;
            }
        }
        for o in out.iter_mut() {
            *o = -*o;
        }
        out
    }

    pub(crate) fn hessian_raw(&self, c: &[f64]) -> [Vec<f64>; 3] {
        let xx = apply(c, &self.axes[0].der2, &self.axes[1].val);
        if self.dim() == 1 {
            let z = vec![0.0; xx.len()];
            return [xx, z.clone(), z];
        }
        let xy = apply(c, &self.axes[0].der, &self.axes[1].der);
        let yy = apply(c, &self.axes[0].val, &self.axes[1].der2);
        [xx, xy, yy]
    }
}

/// `out[i0, i1] = sum_{j0, j1} tx[i0, j0] ty[i1, j1] input[j0, j1]`.
fn apply(input: &[f64], tx: &Table, ty: &Table) -> Vec<f64> {
    let (a0, a1) = (tx.cols, ty.cols);
    let (o0, o1) = (tx.rows, ty.rows);
    debug_assert_eq!(input.len(), a0 * a1);
    // Contract the second axis first: tmp[j0, i1].
    let mut tmp = vec![0.0; a0 * o1];
    for j0 in 0..a0 {
        let src = &input[j0 * a1..(j0 + 1) * a1];
        let dst = &mut tmp[j0 * o1..(j0 + 1) * o1];
        for (i1, d) in dst.iter_mut().enumerate() {
            *d = dot(ty.row(i1), src);
        }
    }
    let mut out = vec![0.0; o0 * o1];
    for i0 in 0..o0 {
        let dst = &mut out[i0 * o1..(i0 + 1) * o1];
        for (j0, &t) in tx.row(i0).iter().enumerate() {
            if t == 0.0 {
                continue;
            }
            let src = &tmp[j0 * o1..(j0 + 1) * o1];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += t * s;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Domain;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_interval(k: usize) -> Transform {
        let b = SpectralBasis::new(Domain::interval(1.0).unwrap(), k).unwrap();
        Transform::for_basis(&b)
    }

    fn square(k: usize) -> Transform {
        let b = SpectralBasis::new(Domain::rectangle(1.0, 0.7).unwrap(), k).unwrap();
        Transform::for_basis(&b)
    }

    #[test]
    fn constant_mode_synthesis() {
        let t = unit_interval(4);
        let b = SpectralBasis::new(Domain::interval(2.0).unwrap(), 4).unwrap();
        let t2 = Transform::for_basis(&b);
        for (tr, l) in [(t, 1.0_f64), (t2, 2.0)] {
            let g = tr.to_grid(&FieldCoeffs::unit(tr.basis(), 0)).unwrap();
            assert!(g.values.iter().all(|v| (v - 1.0 / l.sqrt()).abs() < 1e-15));
        }
    }

    #[test]
    fn cosine_projects_to_one_coefficient() {
        let t = unit_interval(5);
        let f = t.grid().sample(|x, _| (PI * x).cos());
        let c = t.to_coeffs(&f).unwrap();
        for (i, v) in c.coeffs.iter().enumerate() {
            let want = if i == 1 { 1.0 / 2f64.sqrt() } else { 0.0 };
            assert!((v - want).abs() < 1e-14, "mode {i}: {v}");
        }
    }

    #[test]
    fn gradient_of_cosine() {
        let t = unit_interval(4);
        let mut c = FieldCoeffs::zeros(t.basis());
        c.coeffs[1] = 1.0 / 2f64.sqrt();
        let [gx, gy] = t.gradient_on_grid(&c).unwrap();
        for (i, v) in gx.values.iter().enumerate() {
            let x = t.grid().point(i).0;
            assert!((v + PI * (PI * x).sin()).abs() < 1e-13);
        }
        assert!(gy.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_field_has_zero_gradient_and_divergence() {
        let t = square(4);
        let c = FieldCoeffs::constant(t.basis(), 3.0);
        let g = t.gradient_on_grid(&c).unwrap();
        assert!(g[0].max_abs() == 0.0 && g[1].max_abs() == 0.0);
        let d = t.divergence_to_coeffs(&g).unwrap();
        assert!(d.norm() == 0.0);
    }

    #[test]
    fn weak_divergence_matches_dense_quadrature() {
        // Oracle: fine midpoint rule of -∫ g·∇w_j with analytic g = ∇cos(πx).
        let t = unit_interval(4);
        let mut c = FieldCoeffs::zeros(t.basis());
        c.coeffs[1] = 1.0 / 2f64.sqrt();
        let d = t.divergence_to_coeffs(&t.gradient_on_grid(&c).unwrap()).unwrap();
        let n = 20000;
        for j in 0..4 {
            let mut s = 0.0;
            for q in 0..n {
                let x = (q as f64 + 0.5) / n as f64;
                let g = -PI * (PI * x).sin();
                s += g * axis_derivative(j, 1.0, x) / n as f64;
            }
            assert!((d.coeffs[j] + s).abs() < 1e-7, "j={j}");
        }
        assert!((d.coeffs[1] + PI * PI / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eigen_relation_every_mode() {
        for t in [unit_interval(9), square(6)] {
            let b = t.basis().clone();
            for i in 0..b.len() {
                let u = FieldCoeffs::unit(&b, i);
                let d = t.divergence_to_coeffs(&t.gradient_on_grid(&u).unwrap()).unwrap();
                for (j, v) in d.coeffs.iter().enumerate() {
                    let want = if i == j { -b.eigenvalue(i) } else { 0.0 };
                    assert!((v - want).abs() < 1e-10 * (1.0 + want.abs()), "i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn orthonormal_under_quadrature() {
        for t in [unit_interval(12), square(7)] {
            let b = t.basis().clone();
            let vals: Vec<GridField> = (0..b.len())
                .map(|i| t.to_grid(&FieldCoeffs::unit(&b, i)).unwrap())
                .collect();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let p = vals[i].zip_map(&vals[j], |a, b| a * b);
                    let ip = t.grid().integrate(&p);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_undersampled_grid() {
        let b = SpectralBasis::new(Domain::interval(1.0).unwrap(), 8).unwrap();
        let g = QuadratureGrid::new(*b.domain(), 12).unwrap();
        assert!(matches!(Transform::new(&b, &g), Err(Error::DimensionMismatch(_))));
        assert!(Transform::new_resolving(&b, &g).is_ok());
        let g = QuadratureGrid::new(*b.domain(), 13).unwrap();
        assert!(Transform::new(&b, &g).is_ok());
    }

    #[test]
    fn hessian_of_product_mode() {
        let t = square(3);
        let b = t.basis().clone();
        let i = b.index(1, 2);
        let [xx, xy, yy] = t.hessian_on_grid(&FieldCoeffs::unit(&b, i)).unwrap();
        let h = 1e-5;
        for q in [0, 7, 20] {
            let (x, y) = t.grid().point(q);
            let fxx = (b.eval(i, x + h, y) - 2.0 * b.eval(i, x, y) + b.eval(i, x - h, y)) / (h * h);
            let fxy = (b.eval(i, x + h, y + h) - b.eval(i, x + h, y - h) - b.eval(i, x - h, y + h)
                + b.eval(i, x - h, y - h))
                / (4.0 * h * h);
            let fyy = (b.eval(i, x, y + h) - 2.0 * b.eval(i, x, y) + b.eval(i, x, y - h)) / (h * h);
            assert!((xx.values[q] - fxx).abs() < 1e-3);
            assert!((xy.values[q] - fxy).abs() < 1e-3);
            assert!((yy.values[q] - fyy).abs() < 1e-3);
        }
    }

    proptest! {
        #[test]
        fn round_trip_random_coefficients(seed in 0u64..1000, two_d in any::<bool>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = if two_d { square(8) } else { unit_interval(8) };
            let c = FieldCoeffs::from_vec(
                t.basis(),
                (0..t.basis().len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            ).unwrap();
            let back = t.to_coeffs(&t.to_grid(&c).unwrap()).unwrap();
            for (a, b) in back.coeffs.iter().zip(&c.coeffs) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn synthesis_is_linear(a in -3.0f64..3.0, s in -3.0f64..3.0, i in 0usize..16, j in 0usize..16) {
            let t = square(4);
            let b = t.basis().clone();
            let mut c = FieldCoeffs::unit(&b, i).scaled(a);
            c.axpy(s, &FieldCoeffs::unit(&b, j));
            let lhs = t.to_grid(&c).unwrap();
            let gi = t.to_grid(&FieldCoeffs::unit(&b, i)).unwrap();
            let gj = t.to_grid(&FieldCoeffs::unit(&b, j)).unwrap();
            for q in 0..lhs.len() {
                let rhs = a * gi.values[q] + s * gj.values[q];
                prop_assert!((lhs.values[q] - rhs).abs() < 1e-13);
            }
        }
    }
}
