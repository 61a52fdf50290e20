use super::SimState;
use crate::error::Result;
use crate::model::{Derived, Model};
use crate::spectral::Discretization;

/// Time derivatives of the `φ` and `σ` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    pub dalpha: Vec<f64>,
    pub dgamma: Vec<f64>,
}

/// Matrix-free evaluation of the Galerkin system at `state`.
pub fn rhs(model: &Model, disc: &Discretization, state: &SimState) -> Result<Rhs> {
    let der = state.derived(model, disc)?;
    Ok(rhs_from_derived(model, disc, &der, &state.gamma.coeffs))
}

/// The same evaluation from precomputed fields.
///
/// Every flux is pushed through the weak divergence, so the constant mode
/// only ever receives the source and boundary contributions.
pub fn rhs_from_derived(model: &Model, disc: &Discretization, der: &Derived, gamma: &[f64]) -> Rhs {
    let tr = &disc.transform;
    let p = &model.params;
    let chi = model.chi();
    let n = der.phi.len();

    let flux_phi = [0, 1].map(|a| {
        (0..n)
            .map(|q| der.mobility[q] * der.grad_mu[a][q] - der.phi[q] * der.velocity[a][q])
            .collect::<Vec<_>>()
    });
    let mut dalpha = tr.divergence_raw(&flux_phi[0], &flux_phi[1]);
    if !model.sources.is_none() {
        for (d, r) in dalpha.iter_mut().zip(tr.analyze_raw(&der.gamma_phi)) {
            *d += r;
        }
    }

    let flux_sigma = [0, 1].map(|a| {
        (0..n)
            .map(|q| {
                der.nutrient_mobility[q] * (p.diffusivity * der.grad_sigma[a][q] - chi * der.grad_phi[a][q])
                    - der.sigma[q] * der.velocity[a][q]
            })
            .collect::<Vec<_>>()
    });
    let mut dgamma = tr.divergence_raw(&flux_sigma[0], &flux_sigma[1]);
    if !model.sources.is_none() {
        for (d, r) in dgamma.iter_mut().zip(tr.analyze_raw(&der.consumption)) {
            *d -= r;
        }
    }
    let b = p.boundary_exchange;
    if b != 0.0 {
        let supply = model.supply.at(der.t);
        let m_gamma = disc.boundary.apply(gamma);
        for ((d, mg), s) in dgamma.iter_mut().zip(m_gamma).zip(disc.boundary.traces()) {
            *d += b * (supply * s - mg);
        }
    }
    Rhs { dalpha, dgamma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::project_initial_data;
    use crate::model::{InitialProfile, ModelParams};
    use crate::spectral::Domain;

    #[test]
    fn pure_phase_equilibrium() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 5).unwrap();
        let model = Model::new(ModelParams::default());
        let s = project_initial_data(
            &InitialProfile::Constant { value: 1.0 },
            &InitialProfile::Constant { value: 0.0 },
            &d,
            0,
        )
        .unwrap();
        let r = rhs(&model, &d, &s).unwrap();
        assert!(r.dalpha.iter().all(|v| v.abs() < 1e-14));
        // σ∞ = 1 feeds the boundary: only the exchange term remains.
        let b = model.params.boundary_exchange;
        for (j, v) in r.dgamma.iter().enumerate() {
            assert!((v - b * d.boundary.traces()[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_mode_is_conserved_without_sources() {
        let d = Discretization::new(Domain::rectangle(1.0, 2.0).unwrap(), 6).unwrap();
        let model = Model::new(ModelParams {
            boundary_exchange: 0.0,
            ..Default::default()
        });
        let s = project_initial_data(
            &InitialProfile::RandomSeeded {
                mean: 0.1,
                amplitude: 0.3,
                cutoff: 6,
                seed: None,
            },
            &InitialProfile::RandomSeeded {
                mean: 0.8,
                amplitude: 0.2,
                cutoff: 6,
                seed: None,
            },
            &d,
            3,
        )
        .unwrap();
        let r = rhs(&model, &d, &s).unwrap();
        assert!(r.dalpha[0].abs() < 1e-14);
        assert!(r.dgamma[0].abs() < 1e-14);
    }
}
