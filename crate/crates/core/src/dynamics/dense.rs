//! Brute-force Galerkin matrices by direct evaluation of the basis on an
//! oversampled grid. Independent of the transform tables, so it serves as
//! an oracle for the matrix-free right-hand side.

use super::SimState;
use crate::error::Result;
use crate::model::Model;
use crate::spectral::{DenseMatrix, Domain, SpectralBasis};

#[derive(Clone, Debug)]
pub struct DenseGalerkinOperators {
    /// `λ_i` on the diagonal.
    pub stiffness: DenseMatrix,
    /// `∫ m(φ) ∇w_i·∇w_j`.
    pub stiffness_m: DenseMatrix,
    /// `∫ n(φ) ∇w_i·∇w_j`.
    pub stiffness_n: DenseMatrix,
    /// `∫ w_i v·∇w_j`.
    pub convection: DenseMatrix,
    /// `∫_∂Ω w_i w_j`.
    pub boundary_mass: DenseMatrix,
    /// `∫ Γ_φ w_j`.
    pub r_phi: Vec<f64>,
    /// `∫ S w_j`.
    pub r_s: Vec<f64>,
    /// `∫ Ψ'(φ) w_j`.
    pub psi: Vec<f64>,
    /// `∫_∂Ω σ∞ w_j`.
    pub supply: Vec<f64>,
    /// Coefficients of `μ`.
    pub beta: Vec<f64>,
}

/// Point set with weights and the basis (and its gradient) tabulated there.
struct Tabulation {
    weights: Vec<f64>,
    values: Vec<Vec<f64>>,
    grads: Vec<Vec<[f64; 2]>>,
}

fn tabulate(basis: &SpectralBasis, points: &[(f64, f64)], weights: Vec<f64>) -> Tabulation {
    let values = points
        .iter()
        .map(|&(x, y)| (0..basis.len()).map(|i| basis.eval(i, x, y)).collect())
        .collect();
    let grads = points
        .iter()
        .map(|&(x, y)| (0..basis.len()).map(|i| basis.eval_gradient(i, x, y)).collect())
        .collect();
    Tabulation {
        weights,
        values,
        grads,
    }
}

fn interior_points(domain: &Domain, n: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let [lx, ly] = domain.lengths();
    let ny = if domain.dim() == 1 { 1 } else { n };
    let (hx, hy) = (lx / n as f64, if domain.dim() == 1 { 1.0 } else { ly / ny as f64 });
    let mut pts = Vec::with_capacity(n * ny);
    let mut w = Vec::with_capacity(n * ny);
    for qx in 0..n {
        for qy in 0..ny {
            pts.push(((qx as f64 + 0.5) * hx, (qy as f64 + 0.5) * hy));
            w.push(hx * hy);
        }
    }
    (pts, w)
}

fn boundary_points(domain: &Domain, n: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let [lx, ly] = domain.lengths();
    if domain.dim() == 1 {
        return (vec![(0.0, 0.0), (lx, 0.0)], vec![1.0, 1.0]);
    }
    let mut pts = Vec::new();
    let mut w = Vec::new();
    for q in 0..n {
        let s = (q as f64 + 0.5) / n as f64;
        for y in [0.0, ly] {
            pts.push((s * lx, y));
            w.push(lx / n as f64);
        }
        for x in [0.0, lx] {
            pts.push((x, s * ly));
            w.push(ly / n as f64);
        }
    }
    (pts, w)
}

impl DenseGalerkinOperators {
    /// Assemble every operator at `state` with a grid of `oversample × k`
    /// nodes per axis (at least 4).
    pub fn assemble(model: &Model, basis: &SpectralBasis, state: &SimState, oversample: usize) -> Result<Self> {
        let oversample = oversample.max(4);
        let domain = *basis.domain();
        let k = basis.modes()[0];
        let nq = oversample * k;
        let (pts, w) = interior_points(&domain, nq);
        let tab = tabulate(basis, &pts, w);
        let nb = basis.len();
        let p = &model.params;
        let chi = model.chi();
        let alpha = &state.alpha.coeffs;
        let gamma = &state.gamma.coeffs;

        let synth = |c: &[f64], q: usize| -> f64 { c.iter().zip(&tab.values[q]).map(|(a, b)| a * b).sum() };
        let synth_grad = |c: &[f64], q: usize| -> [f64; 2] {
            let mut g = [0.0; 2];
            for (ci, gi) in c.iter().zip(&tab.grads[q]) {
                g[0] += ci * gi[0];
                g[1] += ci * gi[1];
            }
            g
        };
        let npts = pts.len();
        let phi: Vec<f64> = (0..npts).map(|q| synth(alpha, q)).collect();
        let sigma: Vec<f64> = (0..npts).map(|q| synth(gamma, q)).collect();
        let grad_phi: Vec<[f64; 2]> = (0..npts).map(|q| synth_grad(alpha, q)).collect();

        let project = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
            let mut out = vec![0.0; nb];
            for q in 0..npts {
                let fw = f(q) * tab.weights[q];
                for (o, v) in out.iter_mut().zip(&tab.values[q]) {
                    *o += fw * v;
                }
            }
            out
        };
        let psi = project(&|q| model.potential.derivative(phi[q]));
        let beta: Vec<f64> = (0..nb)
            .map(|j| {
                p.potential_weight * psi[j] + p.gradient_weight * basis.eigenvalue(j) * alpha[j]
                    - chi * gamma[j]
            })
            .collect();
        let mu: Vec<f64> = (0..npts).map(|q| synth(&beta, q)).collect();

        let weighted_stiffness = |coef: &dyn Fn(usize) -> f64| -> DenseMatrix {
            let mut m = DenseMatrix::zeros(nb, nb);
            for q in 0..npts {
                let c = coef(q) * tab.weights[q];
                let g = &tab.grads[q];
                for j in 0..nb {
                    for i in 0..nb {
                        m.add(j, i, c * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
                    }
                }
            }
            m
        };
        let stiffness_m = weighted_stiffness(&|q| model.mobility.eval(phi[q]));
        let stiffness_n = weighted_stiffness(&|q| model.nutrient_mobility.eval(phi[q]));
        let stiffness = DenseMatrix::from_diagonal(&basis.eigenvalues());

        // Velocity from an independent pressure solve on a larger cosine basis.
        let velocity = if model.has_flow() {
            dense_velocity(model, basis, &pts, &tab.weights, &mu, &sigma, &grad_phi, state.t, chi)
        } else {
            vec![[0.0; 2]; npts]
        };
        let mut convection = DenseMatrix::zeros(nb, nb);
        for q in 0..npts {
            let v = velocity[q];
            let wq = tab.weights[q];
            for j in 0..nb {
                let vg = v[0] * tab.grads[q][j][0] + v[1] * tab.grads[q][j][1];
                if vg == 0.0 {
                    continue;
                }
                for i in 0..nb {
                    convection.add(j, i, wq * tab.values[q][i] * vg);
                }
            }
        }

        let (r_phi, r_s) = {
            let terms: Vec<(f64, f64)> = (0..npts)
                .map(|q| model.sources.evaluate(phi[q], mu[q], sigma[q], p.diffusivity, chi))
                .collect();
            (project(&|q| terms[q].0), project(&|q| terms[q].1))
        };

        let (bpts, bw) = boundary_points(&domain, nq);
        let btab = tabulate(basis, &bpts, bw);
        let mut boundary_mass = DenseMatrix::zeros(nb, nb);
        let mut supply = vec![0.0; nb];
        let s_inf = model.supply.at(state.t);
        for q in 0..bpts.len() {
            let wq = btab.weights[q];
            for j in 0..nb {
                supply[j] += wq * s_inf * btab.values[q][j];
                for i in 0..nb {
                    boundary_mass.add(j, i, wq * btab.values[q][i] * btab.values[q][j]);
                }
            }
        }

        Ok(DenseGalerkinOperators {
            stiffness,
            stiffness_m,
            stiffness_n,
            convection,
            boundary_mass,
            r_phi,
            r_s,
            psi,
            supply,
            beta,
        })
    }

    /// `(dα/dt, dγ/dt)` assembled from the matrices.
    pub fn rhs(&self, model: &Model, state: &SimState) -> (Vec<f64>, Vec<f64>) {
        let p = &model.params;
        let chi = model.chi();
        let b = p.boundary_exchange;
        let alpha = &state.alpha.coeffs;
        let gamma = &state.gamma.coeffs;
        let sm_beta = self.stiffness_m.matvec(&self.beta);
        let c_alpha = self.convection.matvec(alpha);
        let dalpha = (0..alpha.len())
            .map(|j| -sm_beta[j] + self.r_phi[j] + c_alpha[j])
            .collect();
        let drive: Vec<f64> = gamma
            .iter()
            .zip(alpha)
            .map(|(g, a)| p.diffusivity * g - chi * a)
            .collect();
        let sn = self.stiffness_n.matvec(&drive);
        let c_gamma = self.convection.matvec(gamma);
        let m_gamma = self.boundary_mass.matvec(gamma);
        let dgamma = (0..gamma.len())
            .map(|j| -sn[j] - self.r_s[j] + c_gamma[j] - b * m_gamma[j] + b * self.supply[j])
            .collect();
        (dalpha, dgamma)
    }
}

#[allow(clippy::too_many_arguments)]
fn dense_velocity(
    model: &Model,
    basis: &SpectralBasis,
    pts: &[(f64, f64)],
    weights: &[f64],
    mu: &[f64],
    sigma: &[f64],
    grad_phi: &[[f64; 2]],
    t: f64,
    chi: f64,
) -> Vec<[f64; 2]> {
    let domain = *basis.domain();
    let k = basis.modes()[0];
    let big = if domain.dim() == 1 {
        SpectralBasis::with_modes(domain, [2 * k, 1])
    } else {
        SpectralBasis::with_modes(domain, [2 * k, 2 * k])
    }
    .expect("enlarged basis on a validated domain");
    let kperm = model.params.permeability;
    let forcing: Vec<[f64; 2]> = (0..pts.len())
        .map(|q| {
            let s = mu[q] + chi * sigma[q];
            [s * grad_phi[q][0], s * grad_phi[q][1]]
        })
        .collect();
    let gv = model.volume_source.coefficients(&big, t);
    let mut pc = vec![0.0; big.len()];
    let mut grads = vec![[0.0; 2]; big.len()];
    for (q, &(x, y)) in pts.iter().enumerate() {
        for (j, g) in grads.iter_mut().enumerate() {
            *g = big.eval_gradient(j, x, y);
        }
        for j in 1..big.len() {
            pc[j] += weights[q] * (forcing[q][0] * grads[j][0] + forcing[q][1] * grads[j][1]);
        }
    }
    for j in 1..big.len() {
        pc[j] = (pc[j] + gv[j] / kperm) / big.eigenvalue(j);
    }
    pts.iter()
        .enumerate()
        .map(|(q, &(x, y))| {
            let mut gp = [0.0; 2];
            for (j, c) in pc.iter().enumerate().skip(1) {
                let g = big.eval_gradient(j, x, y);
                gp[0] += c * g[0];
                gp[1] += c * g[1];
            }
            [
                -kperm * (gp[0] - forcing[q][0]),
                -kperm * (gp[1] - forcing[q][1]),
            ]
        })
        .collect()
}
