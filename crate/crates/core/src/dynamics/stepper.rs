use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{rhs, SimState};
use crate::diagnostics::free_energy;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::{Discretization, FieldCoeffs};

/// Range on which the default stabilization bounds `|Ψ''|`.
pub const STABILIZATION_RANGE: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// First-order stabilized IMEX with a diagonal implicit part.
    #[default]
    Imex1,
    /// Classical explicit RK4, for cross-checks at tiny `dt`.
    Rk4Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepperConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// `κ`; `None` picks `sup |Ψ''|` on `[−1.2, 1.2]`.
    pub stabilization: Option<f64>,
    /// Splitting constants `m̄`, `n̄`; `None` picks the mobility upper bounds.
    pub mobility_split: Option<f64>,
    pub nutrient_mobility_split: Option<f64>,
    pub energy_guard: bool,
    /// Allowed energy increase per step, relative to the energy at the first step.
    pub energy_tol: f64,
    pub max_halvings: u32,
    /// Stability constant `c` in `dt ≤ c / (m̄ B λ_max²)` for RK4.
    pub rk4_safety: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 1e-3,
            scheme: Scheme::Imex1,
            stabilization: None,
            mobility_split: None,
            nutrient_mobility_split: None,
            energy_guard: true,
            energy_tol: 1e-10,
            max_halvings: 8,
            rk4_safety: 0.5,
        }
    }
}

impl StepperConfig {
    pub fn with_dt(dt: f64) -> Self {
        StepperConfig {
            dt,
            ..Default::default()
        }
    }

    pub fn check(&self, model: &Model) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.energy_tol >= 0.0) {
            return Err(Error::InvalidParameter("energy_tol must be nonnegative".into()));
        }
        if let Some(k) = self.stabilization {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!("stabilization must be nonnegative, got {k}")));
            }
            let need = model.potential.max_curvature(STABILIZATION_RANGE);
            if self.energy_guard && k < need {
                return Err(Error::InvalidParameter(format!(
                    "stabilization {k} below sup|Psi''| = {need} required by the energy guard"
                )));
            }
        }
        for (name, v) in [("mobility_split", self.mobility_split), ("nutrient_mobility_split", self.nutrient_mobility_split)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if !(self.rk4_safety > 0.0) {
            return Err(Error::InvalidParameter("rk4_safety must be positive".into()));
        }
        Ok(())
    }
}

type ForcingFn = dyn Fn(f64) -> Result<(Vec<f64>, Vec<f64>)> + Send + Sync;

/// Extra explicit source `(f_α(t), f_γ(t))` added to the Galerkin right-hand
/// side, e.g. the residual of a manufactured solution.
#[derive(Clone)]
pub struct Forcing(Arc<ForcingFn>);

impl Forcing {
    pub fn new(f: impl Fn(f64) -> Result<(Vec<f64>, Vec<f64>)> + Send + Sync + 'static) -> Self {
        Forcing(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        (self.0)(t)
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Forcing(..)")
    }
}

/// Integrator bound to a model and a discretization.
#[derive(Clone, Debug)]
pub struct Stepper<'a> {
    pub model: &'a Model,
    pub disc: &'a Discretization,
    pub config: StepperConfig,
    kappa: f64,
    m_bar: f64,
    n_bar: f64,
    /// Energy scale for the guard tolerance, fixed at the first guarded step.
    energy_ref: Option<f64>,
    forcing: Option<Forcing>,
}

impl<'a> Stepper<'a> {
    pub fn new(model: &'a Model, disc: &'a Discretization, config: StepperConfig) -> Result<Self> {
        config.check(model)?;
        model.check(&disc.basis)?;
        let kappa = config
            .stabilization
            .unwrap_or_else(|| model.potential.max_curvature(STABILIZATION_RANGE));
        Ok(Stepper {
            model,
            disc,
            kappa,
            m_bar: config.mobility_split.unwrap_or(model.mobility.bounds().1),
            n_bar: config.nutrient_mobility_split.unwrap_or(model.nutrient_mobility.bounds().1),
            config,
            energy_ref: None,
            forcing: None,
        })
    }

    /// Add an explicit source to every right-hand-side evaluation. The energy
    /// guard is off for forced runs.
    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    /// Galerkin right-hand side at `state`, plus the forcing at `t`.
    fn total_rhs(&self, state: &SimState, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut r = rhs(self.model, self.disc, state)?;
        if let Some(f) = &self.forcing {
            let (fa, fg) = f.eval(t)?;
            if fa.len() != r.dalpha.len() || fg.len() != r.dgamma.len() {
                return Err(Error::DimensionMismatch("forcing length differs from the basis".into()));
            }
            r.dalpha.iter_mut().zip(&fa).for_each(|(a, b)| *a += b);
            r.dgamma.iter_mut().zip(&fg).for_each(|(a, b)| *a += b);
        }
        Ok((r.dalpha, r.dgamma))
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn energy_ref(&self) -> Option<f64> {
        self.energy_ref
    }

    /// Restore the guard's energy scale, e.g. from a checkpoint.
    pub fn set_energy_ref(&mut self, e: Option<f64>) {
        self.energy_ref = e;
    }

    fn guard_active(&self) -> bool {
        self.config.energy_guard
            && self.config.scheme == Scheme::Imex1
            && self.forcing.is_none()
            && self.model.is_dissipative()
    }

    /// Diagonal implicit operators `L^φ_j`, `L^σ_j`.
    fn implicit(&self, j: usize) -> (f64, f64) {
        let p = &self.model.params;
        let lam = self.disc.basis.eigenvalue(j);
        (
            self.m_bar * (p.gradient_weight * lam * lam + p.potential_weight * self.kappa * lam),
            self.n_bar * p.diffusivity * lam,
        )
    }

    /// One step of the configured scheme, of length `dt` ending at time `t_end`.
    pub fn step_to(&mut self, state: &SimState, dt: f64, t_end: f64) -> Result<SimState> {
        let mut next = match self.config.scheme {
            Scheme::Imex1 if self.guard_active() => self.guarded_imex(state, dt)?,
            Scheme::Imex1 => self.step_imex(state, dt)?,
            Scheme::Rk4Explicit => self.step_rk4_explicit(state, dt)?,
        };
        next.t = t_end;
        next.step = state.step + 1;
        Ok(next)
    }

    /// A full step of length `config.dt`.
    pub fn step(&mut self, state: &SimState) -> Result<SimState> {
        let dt = self.config.dt;
        self.step_to(state, dt, (state.step + 1) as f64 * dt)
    }

    /// `(1 + dt L) Δ = dt R̂` for both fields, without the energy guard.
    pub fn step_imex(&self, state: &SimState, dt: f64) -> Result<SimState> {
        let (ra, rg) = self.total_rhs(state, state.t)?;
        let mut alpha = state.alpha.clone();
        let mut gamma = state.gamma.clone();
        for j in 0..alpha.coeffs.len() {
            let (lp, ls) = self.implicit(j);
            alpha.coeffs[j] += dt * ra[j] / (1.0 + dt * lp);
            gamma.coeffs[j] += dt * rg[j] / (1.0 + dt * ls);
        }
        self.finish(state, alpha, gamma, state.t + dt)
    }

    fn guarded_imex(&mut self, state: &SimState, dt: f64) -> Result<SimState> {
        let (m, d) = (self.model, self.disc);
        let e0 = free_energy(m, d, &state.alpha.coeffs, &state.gamma.coeffs);
        let scale = *self.energy_ref.get_or_insert(e0.abs());
        let tol = self.config.energy_tol * scale;
        let mut last_rise = 0.0;
        for h in 0..=self.config.max_halvings {
            let n = 1u64 << h;
            let sub = dt / n as f64;
            let mut s = state.clone();
            let mut e_prev = e0;
            let mut ok = true;
            for i in 0..n {
                let t_next = state.t + (i + 1) as f64 * sub;
                s = self.step_imex(&s, sub)?;
                s.t = t_next;
                let e = free_energy(m, d, &s.alpha.coeffs, &s.gamma.coeffs);
                if e - e_prev > tol {
                    last_rise = e - e_prev;
                    ok = false;
                    break;
                }
                e_prev = e;
            }
            if ok {
                return Ok(s);
            }
        }
        Err(Error::StepFailure {
            t: state.t,
            reason: format!(
                "energy rose by {last_rise:e} (tolerance {tol:e}) after {} halvings",
                self.config.max_halvings
            ),
            state: Box::new(state.clone()),
        })
    }

    /// Largest `dt` the explicit scheme accepts.
    pub fn rk4_limit(&self) -> f64 {
        let lam = self.disc.basis.max_eigenvalue();
        let p = &self.model.params;
        let stiff = (self.m_bar * p.gradient_weight * lam * lam).max(self.n_bar * p.diffusivity * lam);
        if stiff > 0.0 {
            self.config.rk4_safety / stiff
        } else {
            f64::INFINITY
        }
    }

    pub fn step_rk4_explicit(&self, state: &SimState, dt: f64) -> Result<SimState> {
        let limit = self.rk4_limit();
        if dt > limit {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt:e} exceeds the explicit stability bound {limit:e}"
            )));
        }
        let stage = |s: &SimState, k: Option<(&[f64], &[f64])>, h: f64, t: f64| -> Result<(Vec<f64>, Vec<f64>)> {
            let st = match k {
                None => s.clone(),
                Some((ka, kg)) => {
                    let mut a = s.alpha.clone();
                    let mut g = s.gamma.clone();
                    for j in 0..ka.len() {
                        a.coeffs[j] += h * ka[j];
                        g.coeffs[j] += h * kg[j];
                    }
                    SimState::new(t, s.step, a, g)?
                }
            };
            self.total_rhs(&st, t)
        };
        let t = state.t;
        let k1 = stage(state, None, 0.0, t)?;
        let k2 = stage(state, Some((&k1.0, &k1.1)), 0.5 * dt, t + 0.5 * dt)?;
        let k3 = stage(state, Some((&k2.0, &k2.1)), 0.5 * dt, t + 0.5 * dt)?;
        let k4 = stage(state, Some((&k3.0, &k3.1)), dt, t + dt)?;
        let mut alpha = state.alpha.clone();
        let mut gamma = state.gamma.clone();
        for j in 0..alpha.coeffs.len() {
            alpha.coeffs[j] += dt / 6.0 * (k1.0[j] + 2.0 * k2.0[j] + 2.0 * k3.0[j] + k4.0[j]);
            gamma.coeffs[j] += dt / 6.0 * (k1.1[j] + 2.0 * k2.1[j] + 2.0 * k3.1[j] + k4.1[j]);
        }
        let before = state.norm();
        let next = self.finish(state, alpha, gamma, t + dt)?;
        let after = next.norm();
        if after > 1e3 * before.max(f64::MIN_POSITIVE) {
            return Err(Error::BlowUp { t, before, after });
        }
        Ok(next)
    }

    fn finish(&self, state: &SimState, alpha: FieldCoeffs, gamma: FieldCoeffs, t: f64) -> Result<SimState> {
        SimState::new(t, state.step + 1, alpha, gamma).map_err(|e| Error::StepFailure {
            t: state.t,
            reason: e.to_string(),
            state: Box::new(state.clone()),
        })
    }
}
