use crate::dynamics::SimState;
use crate::error::Result;
use crate::model::{Derived, Model};
use crate::spectral::Discretization;

/// Free energy, its rate terms and their split into dissipation, source work
/// and boundary work.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub total: f64,
    /// `∫ AΨ(φ)`.
    pub potential: f64,
    /// `(B/2)‖∇φ‖²`.
    pub interface: f64,
    /// `(D/2)‖σ‖²`.
    pub nutrient: f64,
    /// `χ∫σ(1 − φ)`.
    pub chemotaxis: f64,
    /// `∫ m|∇μ|²`.
    pub diss_mu: f64,
    /// `∫ n|∇N_σ|²`.
    pub diss_sigma: f64,
    /// `(1/K)‖v‖²`.
    pub diss_darcy: f64,
    /// `Db‖σ‖²` on the boundary.
    pub diss_boundary: f64,
    /// `∫ Γ_φ μ`.
    pub work_growth: f64,
    /// `−∫ S N_σ`.
    pub work_consumption: f64,
    /// `∫ Γ_v (p − μφ − (D/2)σ²)`.
    pub work_volume: f64,
    /// `b∫(σ∞ N_σ − χσ(1 − φ))` on the boundary.
    pub work_boundary: f64,
}

impl EnergyBreakdown {
    pub fn dissipation(&self) -> f64 {
        self.diss_mu + self.diss_sigma + self.diss_darcy + self.diss_boundary
    }

    pub fn source_work(&self) -> f64 {
        self.work_growth + self.work_consumption + self.work_volume
    }

    /// Right-hand side of the energy balance, `dE/dt`.
    pub fn rate(&self) -> f64 {
        -self.dissipation() + self.source_work() + self.work_boundary
    }
}

/// The parts of `E` from the coefficients alone.
fn parts(model: &Model, disc: &Discretization, alpha: &[f64], gamma: &[f64], phi: &[f64]) -> [f64; 4] {
    let p = &model.params;
    let chi = model.chi();
    let basis = &disc.basis;
    let grid = disc.grid();
    let psi: Vec<f64> = phi.iter().map(|&f| model.potential.value(f)).collect();
    let grad2: f64 = alpha.iter().enumerate().map(|(j, a)| basis.eigenvalue(j) * a * a).sum();
    let sigma2: f64 = gamma.iter().map(|g| g * g).sum();
    // ∫σ(1 − φ) = ∫σ − Σγα, and ∫σ = γ₀√|Ω|.
    let cross: f64 = gamma.iter().zip(alpha).map(|(g, a)| g * a).sum();
    let int_sigma = gamma[0] * disc.domain().measure().sqrt();
    [
        p.potential_weight * grid.integrate_values(&psi),
        0.5 * p.gradient_weight * grad2,
        0.5 * p.diffusivity * sigma2,
        chi * (int_sigma - cross),
    ]
}

/// `E(φ, σ)` without the rate terms.
pub fn free_energy(model: &Model, disc: &Discretization, alpha: &[f64], gamma: &[f64]) -> f64 {
    let phi = disc.transform.synth_raw(alpha);
    parts(model, disc, alpha, gamma, &phi).iter().sum()
}

pub fn energy(model: &Model, disc: &Discretization, state: &SimState) -> Result<EnergyBreakdown> {
    let d = state.derived(model, disc)?;
    Ok(energy_from_derived(model, disc, state, &d))
}

pub fn energy_from_derived(model: &Model, disc: &Discretization, state: &SimState, d: &Derived) -> EnergyBreakdown {
    let p = &model.params;
    let chi = model.chi();
    let grid = disc.grid();
    let (alpha, gamma) = (&state.alpha.coeffs, &state.gamma.coeffs);
    let [potential, interface, nutrient, chemotaxis] = parts(model, disc, alpha, gamma, &d.phi);
    let n = d.phi.len();
    let int = |f: &dyn Fn(usize) -> f64| grid.integrate_values(&(0..n).map(f).collect::<Vec<_>>());
    let n_sigma = |q: usize| p.diffusivity * d.sigma[q] + chi * (1.0 - d.phi[q]);
    let diss_mu = int(&|q| d.mobility[q] * (d.grad_mu[0][q].powi(2) + d.grad_mu[1][q].powi(2)));
    let diss_sigma = int(&|q| {
        let gx = p.diffusivity * d.grad_sigma[0][q] - chi * d.grad_phi[0][q];
        let gy = p.diffusivity * d.grad_sigma[1][q] - chi * d.grad_phi[1][q];
        d.nutrient_mobility[q] * (gx * gx + gy * gy)
    });
    let diss_darcy = if model.has_flow() {
        int(&|q| d.velocity[0][q].powi(2) + d.velocity[1][q].powi(2)) / p.permeability
    } else {
        0.0
    };
    let b = p.boundary_exchange;
    let bd = &disc.boundary;
    let diss_boundary = p.diffusivity * b * bd.bilinear(gamma, gamma);
    let work_growth = int(&|q| d.gamma_phi[q] * d.mu[q]);
    let work_consumption = -int(&|q| d.consumption[q] * n_sigma(q));
    let work_volume = if model.volume_source.is_zero() {
        0.0
    } else {
        int(&|q| {
            d.gamma_v_grid[q]
                * (d.pressure_grid[q] - d.mu[q] * d.phi[q] - 0.5 * p.diffusivity * d.sigma[q].powi(2))
        })
    };
    // Boundary integrals of products of two fields in the span are exact
    // through M; ∫_∂Ω 1·f uses the traces.
    let s_inf = model.supply.at(state.t);
    let int_sigma = bd.integral(gamma);
    let int_phi = bd.integral(alpha);
    let int_sigma_phi = bd.bilinear(gamma, alpha);
    let int_n = p.diffusivity * int_sigma + chi * (disc.domain().boundary_measure() - int_phi);
    let work_boundary = b * (s_inf * int_n - chi * (int_sigma - int_sigma_phi));
    EnergyBreakdown {
        total: potential + interface + nutrient + chemotaxis,
        potential,
        interface,
        nutrient,
        chemotaxis,
        diss_mu,
        diss_sigma,
        diss_darcy,
        diss_boundary,
        work_growth,
        work_consumption,
        work_volume,
        work_boundary,
    }
}
