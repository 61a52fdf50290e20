use super::{Model, ModelParams, Potential, SourceModel};
use crate::error::{Error, Result};
use crate::spectral::{Discretization, FieldCoeffs, GridField, ZERO_MEAN_TOLERANCE};

/// All fields derived from `(α, γ, t)`, in coefficients and on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Derived {
    pub t: f64,
    pub phi: Vec<f64>,
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
    pub grad_phi: [Vec<f64>; 2],
    pub grad_mu: [Vec<f64>; 2],
    pub grad_sigma: [Vec<f64>; 2],
    /// Coefficients of `μ` in the working basis.
    pub beta: Vec<f64>,
    /// Coefficients of `p` in the pressure basis (zero without flow).
    pub pressure: Vec<f64>,
    pub pressure_grid: Vec<f64>,
    pub velocity: [Vec<f64>; 2],
    /// `(μ + χσ)∇φ`.
    pub forcing: [Vec<f64>; 2],
    /// Coefficients of `Γ_v(t)` in the working basis.
    pub gamma_v: Vec<f64>,
    pub gamma_v_grid: Vec<f64>,
    pub gamma_phi: Vec<f64>,
    pub consumption: Vec<f64>,
    pub mobility: Vec<f64>,
    pub nutrient_mobility: Vec<f64>,
}

impl Derived {
    pub fn compute(
        model: &Model,
        disc: &Discretization,
        alpha: &[f64],
        gamma: &[f64],
        t: f64,
    ) -> Result<Self> {
        let tr = &disc.transform;
        let p = &model.params;
        let chi = model.chi();
        let phi = tr.synth_raw(alpha);
        let sigma = tr.synth_raw(gamma);
        let beta = mu_coeffs(tr, &model.potential, p, chi, &phi, alpha, gamma);
        let mu = tr.synth_raw(&beta);
        let grad_phi = tr.gradient_raw(alpha);
        let grad_mu = tr.gradient_raw(&beta);
        let grad_sigma = tr.gradient_raw(gamma);
        let gamma_v = model.volume_source.coefficients(&disc.basis, t);
        let gamma_v_grid = tr.synth_raw(&gamma_v);
        let n = phi.len();
        let (pressure, pressure_grid, velocity, forcing) = if model.has_flow() {
            let forcing = [0, 1].map(|a| {
                (0..n)
                    .map(|q| (mu[q] + chi * sigma[q]) * grad_phi[a][q])
                    .collect::<Vec<_>>()
            });
            let (pc, vel) = darcy_raw(disc, p.permeability, &gamma_v, &forcing)?;
            let pg = disc.pressure.synth_raw(&pc);
            (pc, pg, vel, forcing)
        } else {
            let z = vec![0.0; n];
            (
                vec![0.0; disc.pressure_basis.len()],
                z.clone(),
                [z.clone(), z.clone()],
                [z.clone(), z],
            )
        };
        let mut gamma_phi = Vec::with_capacity(n);
        let mut consumption = Vec::with_capacity(n);
        for q in 0..n {
            let (g, s) = model
                .sources
                .evaluate(phi[q], mu[q], sigma[q], p.diffusivity, chi);
            gamma_phi.push(g);
            consumption.push(s);
        }
        let mobility = phi.iter().map(|&f| model.mobility.eval(f)).collect();
        let nutrient_mobility = phi.iter().map(|&f| model.nutrient_mobility.eval(f)).collect();
        Ok(Derived {
            t,
            phi,
            sigma,
            mu,
            grad_phi,
            grad_mu,
            grad_sigma,
            beta,
            pressure,
            pressure_grid,
            velocity,
            forcing,
            gamma_v,
            gamma_v_grid,
            gamma_phi,
            consumption,
            mobility,
            nutrient_mobility,
        })
    }
}

/// `β_j = A⟨Ψ'(φ), w_j⟩ + Bλ_j α_j − χγ_j`.
fn mu_coeffs(
    tr: &crate::spectral::Transform,
    potential: &Potential,
    p: &ModelParams,
    chi: f64,
    phi_grid: &[f64],
    alpha: &[f64],
    gamma: &[f64],
) -> Vec<f64> {
    let dpsi: Vec<f64> = phi_grid.iter().map(|&f| potential.derivative(f)).collect();
    let mut beta = tr.analyze_raw(&dpsi);
    let basis = tr.basis();
    for (j, b) in beta.iter_mut().enumerate() {
        *b = p.potential_weight * *b + p.gradient_weight * basis.eigenvalue(j) * alpha[j]
            - chi * gamma[j];
    }
    beta
}

/// Pressure in the pressure basis and velocity on the grid.
fn darcy_raw(
    disc: &Discretization,
    permeability: f64,
    gamma_v: &[f64],
    forcing: &[Vec<f64>; 2],
) -> Result<(Vec<f64>, [Vec<f64>; 2])> {
    if permeability <= 0.0 {
        return Err(Error::InvalidParameter(
            "Darcy solve needs a positive permeability".into(),
        ));
    }
    let pt = &disc.pressure;
    let div = pt.divergence_raw(&forcing[0], &forcing[1]);
    let src = disc.pad(gamma_v);
    let mut rhs: Vec<f64> = src
        .iter()
        .zip(&div)
        .map(|(g, d)| g / permeability - d)
        .collect();
    if rhs[0].abs() >= ZERO_MEAN_TOLERANCE * (1.0 + rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()))) {
        return Err(Error::ZeroMeanViolation {
            value: rhs[0],
            tolerance: ZERO_MEAN_TOLERANCE,
        });
    }
    rhs[0] = 0.0;
    let pb = &disc.pressure_basis;
    for (j, r) in rhs.iter_mut().enumerate().skip(1) {
        *r /= pb.eigenvalue(j);
    }
    let grad_p = pt.gradient_raw(&rhs);
    let velocity = [0, 1].map(|a| {
        grad_p[a]
            .iter()
            .zip(&forcing[a])
            .map(|(g, f)| -permeability * (g - f))
            .collect::<Vec<_>>()
    });
    Ok((rhs, velocity))
}

/// Chemical potential `μ` in the working basis.
pub fn chemical_potential(
    disc: &Discretization,
    phi: &FieldCoeffs,
    sigma: &FieldCoeffs,
    params: &ModelParams,
    potential: &Potential,
) -> Result<FieldCoeffs> {
    phi.check_same_basis(sigma)?;
    let tr = &disc.transform;
    let grid = tr.to_grid(phi)?;
    Ok(FieldCoeffs {
        basis: phi.basis.clone(),
        coeffs: mu_coeffs(
            tr,
            potential,
            params,
            params.chemotaxis,
            &grid.values,
            &phi.coeffs,
            &sigma.coeffs,
        ),
    })
}

/// Output of [`solve_darcy`]. The pressure lives in the pressure basis of the
/// discretization.
#[derive(Clone, Debug)]
pub struct DarcySolution {
    pub pressure: FieldCoeffs,
    pub velocity: [GridField; 2],
}

pub fn solve_darcy(
    disc: &Discretization,
    phi: &FieldCoeffs,
    mu: &FieldCoeffs,
    sigma: &FieldCoeffs,
    gamma_v: &FieldCoeffs,
    params: &ModelParams,
) -> Result<DarcySolution> {
    phi.check_same_basis(mu)?;
    phi.check_same_basis(sigma)?;
    phi.check_same_basis(gamma_v)?;
    if gamma_v.coeffs[0].abs() >= ZERO_MEAN_TOLERANCE {
        return Err(Error::ZeroMeanViolation {
            value: gamma_v.coeffs[0],
            tolerance: ZERO_MEAN_TOLERANCE,
        });
    }
    let tr = &disc.transform;
    let mu_g = tr.synth_raw(&mu.coeffs);
    let sigma_g = tr.synth_raw(&sigma.coeffs);
    let grad_phi = tr.gradient_raw(&phi.coeffs);
    let chi = params.chemotaxis;
    let forcing = [0, 1].map(|a| {
        (0..mu_g.len())
            .map(|q| (mu_g[q] + chi * sigma_g[q]) * grad_phi[a][q])
            .collect::<Vec<_>>()
    });
    let (pc, vel) = darcy_raw(disc, params.permeability, &gamma_v.coeffs, &forcing)?;
    let nodes = disc.grid().nodes();
    let [vx, vy] = vel;
    Ok(DarcySolution {
        pressure: FieldCoeffs {
            basis: disc.pressure_basis.clone(),
            coeffs: pc,
        },
        velocity: [
            GridField { nodes, values: vx },
            GridField { nodes, values: vy },
        ],
    })
}

/// `(Γ_φ, S)` on the grid.
pub fn evaluate_sources(
    phi: &GridField,
    mu: &GridField,
    sigma: &GridField,
    sources: &SourceModel,
    params: &ModelParams,
) -> (GridField, GridField) {
    let mut g = GridField::zeros(phi.nodes);
    let mut s = GridField::zeros(phi.nodes);
    for q in 0..phi.len() {
        let (a, b) = sources.evaluate(
            phi.values[q],
            mu.values[q],
            sigma.values[q],
            params.diffusivity,
            params.chemotaxis,
        );
        g.values[q] = a;
        s.values[q] = b;
    }
    (g, s)
}

/// `N = (D/2)σ² + χσ(1 − φ)` and its partial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct NutrientEnergy {
    pub density: GridField,
    pub d_sigma: GridField,
    pub d_phi: GridField,
}

pub fn nutrient_free_energy_density(
    phi: &GridField,
    sigma: &GridField,
    params: &ModelParams,
) -> NutrientEnergy {
    let (d, chi) = (params.diffusivity, params.chemotaxis);
    NutrientEnergy {
        density: phi.zip_map(sigma, |f, s| 0.5 * d * s * s + chi * s * (1.0 - f)),
        d_sigma: phi.zip_map(sigma, |f, s| d * s + chi * (1.0 - f)),
        d_phi: sigma.map(|s| -chi * s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, RateProfile, VolumeSource};
    use crate::spectral::Domain;
    use std::f64::consts::PI;

    fn disc_1d(k: usize) -> Discretization {
        Discretization::new(Domain::interval(1.0).unwrap(), k).unwrap()
    }

    #[test]
    fn mu_vanishes_at_the_wells() {
        let d = disc_1d(6);
        let p = ModelParams::default();
        let pot = Potential::quartic();
        for v in [1.0, 0.0, -1.0] {
            let phi = FieldCoeffs::constant(&d.basis, v);
            let mu = chemical_potential(&d, &phi, &FieldCoeffs::zeros(&d.basis), &p, &pot).unwrap();
            assert!(mu.norm() < 1e-14, "φ = {v}");
        }
    }

    #[test]
    fn mu_linearization() {
        // Oracle: dense quadrature of the linearized chemical potential.
        let d = disc_1d(6);
        let p = ModelParams {
            gradient_weight: 0.02,
            ..Default::default()
        };
        let pot = Potential::quartic();
        let eps = 1e-6;
        let phi = FieldCoeffs::unit(&d.basis, 1).scaled(eps);
        let mu = chemical_potential(&d, &phi, &FieldCoeffs::zeros(&d.basis), &p, &pot).unwrap();
        let lin = -p.potential_weight + p.gradient_weight * PI * PI;
        assert!((mu.coeffs[1] - lin * eps).abs() < 10.0 * eps.powi(3));
        let others: f64 = mu.coeffs.iter().enumerate().filter(|(i, _)| *i != 1).map(|(_, v)| v.abs()).sum();
        assert!(others < 10.0 * eps.powi(3));
    }

    #[test]
    fn mu_is_affine_in_sigma() {
        let d = disc_1d(5);
        let p = ModelParams::default();
        let pot = Potential::quartic();
        let phi = FieldCoeffs::from_vec(&d.basis, vec![0.1, 0.3, -0.2, 0.05, 0.0]).unwrap();
        let s1 = FieldCoeffs::from_vec(&d.basis, vec![1.0, 0.0, 0.2, 0.0, 0.1]).unwrap();
        let s2 = FieldCoeffs::from_vec(&d.basis, vec![0.5, -0.4, 0.0, 0.3, 0.0]).unwrap();
        let mut s12 = s1.clone();
        s12.axpy(1.0, &s2);
        let a = chemical_potential(&d, &phi, &s1, &p, &pot).unwrap();
        let b = chemical_potential(&d, &phi, &s12, &p, &pot).unwrap();
        for j in 0..5 {
            assert!((b.coeffs[j] - a.coeffs[j] + p.chemotaxis * s2.coeffs[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn darcy_quiescent() {
        let d = disc_1d(6);
        let p = ModelParams::default();
        let c = FieldCoeffs::constant(&d.basis, 0.3);
        let z = FieldCoeffs::zeros(&d.basis);
        let sol = solve_darcy(&d, &c, &c, &c, &z, &p).unwrap();
        assert_eq!(sol.pressure.norm(), 0.0);
        assert_eq!(sol.velocity[0].max_abs(), 0.0);
    }

    #[test]
    fn darcy_analytic_source() {
        // −p'' = cos(πx) ⇒ p = cos(πx)/π² and v = −p' = sin(πx)/π.
        let d = disc_1d(6);
        let p = ModelParams::default();
        let c = FieldCoeffs::constant(&d.basis, 0.3);
        let src = VolumeSource::Cosine {
            terms: vec![crate::model::CosineTerm {
                amplitude: 1.0,
                modes: [1, 0],
            }],
            frequency: 0.0,
        };
        let gv = FieldCoeffs::from_vec(&d.basis, src.coefficients(&d.basis, 0.0)).unwrap();
        let sol = solve_darcy(&d, &c, &FieldCoeffs::zeros(&d.basis), &c, &gv, &p).unwrap();
        for q in 0..d.grid().len() {
            let (x, _) = d.grid().point(q);
            let pv = sol.pressure.evaluate(x, 0.0);
            assert!((pv - (PI * x).cos() / (PI * PI)).abs() < 1e-14);
            let want_v = (PI * x).sin() / PI;
            assert!((sol.velocity[0].values[q] - want_v).abs() < 1e-14);
        }
        assert_eq!(sol.pressure.coeffs[0], 0.0);
    }

    #[test]
    fn darcy_rejects_nonzero_mean_source() {
        let d = disc_1d(4);
        let c = FieldCoeffs::constant(&d.basis, 0.3);
        let gv = FieldCoeffs::constant(&d.basis, 1.0);
        let r = solve_darcy(&d, &c, &c, &c, &gv, &ModelParams::default());
        assert!(matches!(r, Err(Error::ZeroMeanViolation { .. })));
    }

    #[test]
    fn nutrient_energy_cases() {
        let g = crate::spectral::QuadratureGrid::new(Domain::interval(1.0).unwrap(), 4).unwrap();
        let p = ModelParams {
            diffusivity: 2.0,
            chemotaxis: 0.5,
            ..Default::default()
        };
        let phi = g.sample(|x, _| x);
        let zero = g.zeros();
        let e = nutrient_free_energy_density(&phi, &zero, &p);
        assert_eq!(e.density.max_abs(), 0.0);
        assert_eq!(e.d_phi.max_abs(), 0.0);
        for q in 0..4 {
            assert_eq!(e.d_sigma.values[q], 0.5 * (1.0 - phi.values[q]));
        }
        let one = g.sample(|_, _| 1.0);
        let s = g.sample(|_, _| 3.0);
        let e = nutrient_free_energy_density(&one, &s, &p);
        assert!(e.density.values.iter().all(|v| *v == 9.0));
        assert!(e.d_sigma.values.iter().all(|v| *v == 6.0));
    }

    #[test]
    fn derived_mean_of_divergence_matches_source() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 6).unwrap();
        let model = Model::new(ModelParams::default())
            .with_sources(SourceModel::hawkins(0.1, RateProfile::Constant))
            .with_volume_source(VolumeSource::Cosine {
                terms: vec![crate::model::CosineTerm {
                    amplitude: 0.3,
                    modes: [1, 2],
                }],
                frequency: 1.0,
            });
        let mut alpha = vec![0.0; 36];
        alpha[1] = 0.2;
        alpha[7] = -0.1;
        let gamma = vec![0.0; 36];
        let der = Derived::compute(&model, &d, &alpha, &gamma, 0.3).unwrap();
        // −∫ v·∇w_j = ∫ Γ_v w_j for every working mode.
        let div = d.transform.divergence_raw(&der.velocity[0], &der.velocity[1]);
        for j in 0..36 {
            assert!((div[j] - der.gamma_v[j]).abs() < 1e-12, "mode {j}");
        }
    }
}
