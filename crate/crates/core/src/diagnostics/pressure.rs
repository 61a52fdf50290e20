use crate::dynamics::SimState;
use crate::error::Result;
use crate::model::Model;
use crate::spectral::Discretization;

/// Rescaled pressures on the grid and `λ_v = p − μφ − (D/2)σ²` recovered from each.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureReformulations {
    /// `q = p − AΨ(φ) − (B/2)|∇φ|²`.
    pub q: Vec<f64>,
    /// `p̂ = p + (D/2)σ² + χσ(1 − φ)`.
    pub p_hat: Vec<f64>,
    /// `p̃ = p − (D/2)σ² − μφ`.
    pub p_tilde: Vec<f64>,
    /// `λ_v` from `q`, `p̂` and `p̃` in that order.
    pub lambda_v: [Vec<f64>; 3],
}

impl PressureReformulations {
    /// Largest pointwise spread between the three `λ_v` values.
    pub fn spread(&self) -> f64 {
        let [a, b, c] = &self.lambda_v;
        (0..a.len())
            .map(|q| {
                let hi = a[q].max(b[q]).max(c[q]);
                let lo = a[q].min(b[q]).min(c[q]);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

pub fn pressure_reformulations(model: &Model, disc: &Discretization, state: &SimState) -> Result<PressureReformulations> {
    let d = state.derived(model, disc)?;
    let pr = &model.params;
    let (a, b, dd, chi) = (pr.potential_weight, pr.gradient_weight, pr.diffusivity, model.chi());
    let n = d.phi.len();
    let p = &d.pressure_grid;
    let mut out = PressureReformulations {
        q: Vec::with_capacity(n),
        p_hat: Vec::with_capacity(n),
        p_tilde: Vec::with_capacity(n),
        lambda_v: [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)],
    };
    for i in 0..n {
        let (phi, sigma, mu) = (d.phi[i], d.sigma[i], d.mu[i]);
        let psi = a * model.potential.value(phi);
        let grad2 = 0.5 * b * (d.grad_phi[0][i].powi(2) + d.grad_phi[1][i].powi(2));
        let half_s2 = 0.5 * dd * sigma * sigma;
        let cross = chi * sigma * (1.0 - phi);
        let q = p[i] - psi - grad2;
        let p_hat = p[i] + half_s2 + cross;
        let p_tilde = p[i] - half_s2 - mu * phi;
        out.lambda_v[0].push(q + psi + grad2 - half_s2 - mu * phi);
        out.lambda_v[1].push(p_hat - mu * phi - dd * sigma * sigma - cross);
        out.lambda_v[2].push(p_tilde);
        out.q.push(q);
        out.p_hat.push(p_hat);
        out.p_tilde.push(p_tilde);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::project_initial_data;
    use crate::model::{InitialProfile, ModelParams};
    use crate::spectral::Domain;

    #[test]
    fn pure_phase_state() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 4).unwrap();
        let m = Model::new(ModelParams::default());
        let s = project_initial_data(
            &InitialProfile::Constant { value: 1.0 },
            &InitialProfile::Constant { value: 0.0 },
            &d,
            0,
        )
        .unwrap();
        let r = pressure_reformulations(&m, &d, &s).unwrap();
        let p = &s.derived(&m, &d).unwrap().pressure_grid;
        for i in 0..p.len() {
            assert!((r.q[i] - p[i]).abs() < 1e-14);
            assert_eq!(r.p_hat[i], p[i]);
            for l in &r.lambda_v {
                assert!((l[i] - p[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn random_states_agree() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.5).unwrap(), 6).unwrap();
        let m = Model::new(ModelParams::default());
        for seed in 0..3 {
            let s = project_initial_data(
                &InitialProfile::RandomSeeded {
                    mean: 0.0,
                    amplitude: 0.5,
                    cutoff: 6,
                    seed: None,
                },
                &InitialProfile::RandomSeeded {
                    mean: 0.5,
                    amplitude: 0.3,
                    cutoff: 6,
                    seed: None,
                },
                &d,
                seed,
            )
            .unwrap();
            let r = pressure_reformulations(&m, &d, &s).unwrap();
            assert!(r.spread() < 1e-9, "{}", r.spread());
            assert_eq!(r.lambda_v[2], r.p_tilde);
        }
    }
}
