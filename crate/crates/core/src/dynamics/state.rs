use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Derived, InitialProfile, Model};
use crate::spectral::{Discretization, FieldCoeffs};

/// Time, step counter and the `(φ, σ)` coefficients, with a cache of the
/// quantities derived from them.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub step: u64,
    pub alpha: FieldCoeffs,
    pub gamma: FieldCoeffs,
    cache: Option<Cache>,
}

/// Derived fields together with the inputs they were computed from.
#[derive(Clone, Debug)]
struct Cache {
    t: f64,
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    derived: Arc<Derived>,
}

impl PartialEq for SimState {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t
            && self.step == other.step
            && self.alpha == other.alpha
            && self.gamma == other.gamma
    }
}

impl SimState {
    pub fn new(t: f64, step: u64, alpha: FieldCoeffs, gamma: FieldCoeffs) -> Result<Self> {
        alpha.check_same_basis(&gamma)?;
        let s = SimState {
            t,
            step,
            alpha,
            gamma,
            cache: None,
        };
        s.check_finite()?;
        Ok(s)
    }

    pub fn check_finite(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::NonFinite(format!("time {}", self.t)));
        }
        for (name, c) in [("phi", &self.alpha), ("sigma", &self.gamma)] {
            if let Some(i) = c.coeffs.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("{name} coefficient {i} at t = {}", self.t)));
            }
        }
        Ok(())
    }

    /// Derived fields, from the cache when it matches `(α, γ, t)`.
    pub fn derived(&self, model: &Model, disc: &Discretization) -> Result<Arc<Derived>> {
        if let Some(c) = &self.cache {
            if c.t == self.t && c.alpha == self.alpha.coeffs && c.gamma == self.gamma.coeffs {
                return Ok(c.derived.clone());
            }
        }
        Ok(Arc::new(Derived::compute(
            model,
            disc,
            &self.alpha.coeffs,
            &self.gamma.coeffs,
            self.t,
        )?))
    }

    /// Like [`SimState::derived`] but keeps the result.
    pub fn ensure_derived(&mut self, model: &Model, disc: &Discretization) -> Result<Arc<Derived>> {
        let d = self.derived(model, disc)?;
        self.set_cache(d.clone());
        Ok(d)
    }

    pub(crate) fn set_cache(&mut self, derived: Arc<Derived>) {
        debug_assert_eq!(derived.t, self.t);
        self.cache = Some(Cache {
            t: self.t,
            alpha: self.alpha.coeffs.clone(),
            gamma: self.gamma.coeffs.clone(),
            derived,
        });
    }

    /// Whether the cached fields are present and consistent with the state.
    pub fn cache_is_valid(&self, model: &Model, disc: &Discretization) -> bool {
        match &self.cache {
            None => false,
            Some(c) => {
                c.t == self.t
                    && c.alpha == self.alpha.coeffs
                    && c.gamma == self.gamma.coeffs
                    && Derived::compute(model, disc, &c.alpha, &c.gamma, c.t)
                        .map(|fresh| *c.derived == fresh)
                        .unwrap_or(false)
            }
        }
    }

    pub fn norm(&self) -> f64 {
        (self.alpha.norm().powi(2) + self.gamma.norm().powi(2)).sqrt()
    }
}

/// L² projection of the initial profiles.
pub fn project_initial_data(
    phi0: &InitialProfile,
    sigma0: &InitialProfile,
    disc: &Discretization,
    seed: u64,
) -> Result<SimState> {
    let alpha = phi0.project(&disc.basis, seed)?;
    // Distinct stream for σ so identical random specs do not coincide.
    let gamma = sigma0.project(&disc.basis, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?;
    SimState::new(0.0, 0, alpha, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CosineTerm, ModelParams};
    use crate::spectral::Domain;

    #[test]
    fn initial_projection() {
        let d = Discretization::new(Domain::interval(1.0).unwrap(), 4).unwrap();
        let phi0 = InitialProfile::Cosine {
            offset: 0.0,
            terms: vec![CosineTerm {
                amplitude: 1.0,
                modes: [1, 0],
            }],
        };
        let s = project_initial_data(&phi0, &InitialProfile::Constant { value: 0.5 }, &d, 1).unwrap();
        assert!((s.alpha.coeffs[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s.gamma.coeffs[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cache_tracks_state() {
        let d = Discretization::new(Domain::interval(1.0).unwrap(), 4).unwrap();
        let model = Model::new(ModelParams::default());
        let mut s = project_initial_data(
            &InitialProfile::Constant { value: 0.2 },
            &InitialProfile::Constant { value: 1.0 },
            &d,
            0,
        )
        .unwrap();
        assert!(!s.cache_is_valid(&model, &d));
        s.ensure_derived(&model, &d).unwrap();
        assert!(s.cache_is_valid(&model, &d));
        s.alpha.coeffs[1] = 0.1;
        assert!(!s.cache_is_valid(&model, &d));
    }

    #[test]
    fn non_finite_rejected() {
        let b = crate::spectral::SpectralBasis::new(Domain::interval(1.0).unwrap(), 2).unwrap();
        let mut a = FieldCoeffs::zeros(&b);
        a.coeffs[1] = f64::NAN;
        assert!(matches!(
            SimState::new(0.0, 0, a, FieldCoeffs::zeros(&b)),
            Err(Error::NonFinite(_))
        ));
    }
}
