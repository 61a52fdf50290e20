use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// `h(φ) = ½(1 + clamp(φ, −1, 1))`: 0 in healthy tissue, 1 in the tumour.
pub fn interpolation(phi: f64) -> f64 {
    0.5 * (1.0 + phi.clamp(-1.0, 1.0))
}

/// How the Hawkins rate `f` depends on `φ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateProfile {
    /// `f = f₀·h(φ)`.
    #[default]
    Interpolated,
    /// `f ≡ f₀`.
    Constant,
}

/// Named source families.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    #[default]
    None,
    /// `Γ_φ = S = f(φ)·(N_σ − μ)`.
    Hawkins {
        rate: f64,
        #[serde(default)]
        profile: RateProfile,
    },
    /// `Γ_φ = h(φ)(λ_p σ − λ_a)`, `S = λ_c h(φ) σ`.
    Proliferation {
        proliferation: f64,
        apoptosis: f64,
        consumption: f64,
    },
}

/// The four coefficient functions of the affine-in-`μ` source structure:
/// `Γ_φ = Λ_φ − Θ_φ μ`, `S = Λ_S − Θ_S μ`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SourceTerms {
    pub lambda_phi: f64,
    pub lambda_s: f64,
    pub theta_phi: f64,
    pub theta_s: f64,
}

impl SourceTerms {
    pub fn gamma_phi(&self, mu: f64) -> f64 {
        self.lambda_phi - self.theta_phi * mu
    }

    pub fn consumption(&self, mu: f64) -> f64 {
        self.lambda_s - self.theta_s * mu
    }
}

/// User-supplied source functions, available through the library API only.
pub trait CustomSources: Send + Sync {
    fn terms(&self, phi: f64, sigma: f64) -> SourceTerms;

    fn name(&self) -> &str {
        "custom"
    }
}

#[derive(Clone)]
enum Kind {
    Named(SourceSpec),
    Custom(Arc<dyn CustomSources>),
}

#[derive(Clone)]
pub struct SourceModel {
    kind: Kind,
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Named(s) => write!(f, "SourceModel({s:?})"),
            Kind::Custom(c) => write!(f, "SourceModel(custom: {})", c.name()),
        }
    }
}

impl Default for SourceModel {
    fn default() -> Self {
        SourceModel::from_spec(SourceSpec::None)
    }
}

impl SourceModel {
    pub fn from_spec(spec: SourceSpec) -> Self {
        SourceModel {
            kind: Kind::Named(spec),
        }
    }

    pub fn custom(c: Arc<dyn CustomSources>) -> Self {
        SourceModel {
            kind: Kind::Custom(c),
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn hawkins(rate: f64, profile: RateProfile) -> Self {
        Self::from_spec(SourceSpec::Hawkins { rate, profile })
    }

    pub fn proliferation(proliferation: f64, apoptosis: f64, consumption: f64) -> Self {
        Self::from_spec(SourceSpec::Proliferation {
            proliferation,
            apoptosis,
            consumption,
        })
    }

    pub fn spec(&self) -> Option<&SourceSpec> {
        match &self.kind {
            Kind::Named(s) => Some(s),
            Kind::Custom(_) => None,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, Kind::Named(SourceSpec::None))
    }

    /// Coefficient functions at `(φ, σ)`; `chemotaxis` is the effective `χ`.
    pub fn terms(&self, phi: f64, sigma: f64, diffusivity: f64, chemotaxis: f64) -> SourceTerms {
        match &self.kind {
            Kind::Named(SourceSpec::None) => SourceTerms::default(),
            Kind::Named(SourceSpec::Hawkins { rate, profile }) => {
                let f = match profile {
                    RateProfile::Interpolated => rate * interpolation(phi),
                    RateProfile::Constant => *rate,
                };
                let lambda = f * (diffusivity * sigma + chemotaxis * (1.0 - phi));
                SourceTerms {
                    lambda_phi: lambda,
                    lambda_s: lambda,
                    theta_phi: f,
                    theta_s: f,
                }
            }
            Kind::Named(SourceSpec::Proliferation {
                proliferation,
                apoptosis,
                consumption,
            }) => {
                let h = interpolation(phi);
                SourceTerms {
                    lambda_phi: h * (proliferation * sigma - apoptosis),
                    lambda_s: consumption * h * sigma,
                    theta_phi: 0.0,
                    theta_s: 0.0,
                }
            }
            Kind::Custom(c) => c.terms(phi, sigma),
        }
    }

    /// `(Γ_φ, S)` at a point.
    pub fn evaluate(
        &self,
        phi: f64,
        mu: f64,
        sigma: f64,
        diffusivity: f64,
        chemotaxis: f64,
    ) -> (f64, f64) {
        let t = self.terms(phi, sigma, diffusivity, chemotaxis);
        (t.gamma_phi(mu), t.consumption(mu))
    }

    pub fn check(&self) -> crate::error::Result<()> {
        let bad = |what: &str, v: f64| {
            Err(crate::error::Error::InvalidParameter(format!(
                "source {what} = {v} must be nonnegative and finite"
            )))
        };
        match self.spec() {
            Some(SourceSpec::Hawkins { rate, .. }) if !(*rate >= 0.0 && rate.is_finite()) => {
                bad("rate", *rate)
            }
            Some(SourceSpec::Proliferation {
                proliferation,
                apoptosis,
                consumption,
            }) => {
                for (n, v) in [
                    ("proliferation", *proliferation),
                    ("apoptosis", *apoptosis),
                    ("consumption", *consumption),
                ] {
                    if !(v >= 0.0 && v.is_finite()) {
                        return bad(n, v);
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hawkins_substitution() {
        let s = SourceModel::hawkins(0.1, RateProfile::Constant);
        let (g, c) = s.evaluate(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!((g - 0.1).abs() < 1e-15);
        assert!((c - 0.1).abs() < 1e-15);
    }

    #[test]
    fn hawkins_is_a_perfect_square() {
        let s = SourceModel::hawkins(0.7, RateProfile::Interpolated);
        let (d, chi) = (1.3, 0.4);
        for &(phi, mu, sigma) in &[(0.3, -1.0, 2.0), (-0.9, 3.0, 0.1), (1.5, 0.2, -0.4)] {
            let (g, c) = s.evaluate(phi, mu, sigma, d, chi);
            let n_sigma = d * sigma + chi * (1.0 - phi);
            assert!(c * n_sigma - g * mu >= -1e-15);
        }
    }

    #[test]
    fn proliferation_substitution() {
        let s = SourceModel::proliferation(1.0, 0.5, 1.0);
        let (g, c) = s.evaluate(1.0, 7.0, 2.0, 1.0, 0.3);
        assert_eq!((g, c), (1.5, 2.0));
        let (g, c) = s.evaluate(-1.0, 7.0, 2.0, 1.0, 0.3);
        assert_eq!((g, c), (0.0, 0.0));
    }

    #[test]
    fn interpolation_clamps() {
        assert_eq!(interpolation(-3.0), 0.0);
        assert_eq!(interpolation(3.0), 1.0);
        assert_eq!(interpolation(0.0), 0.5);
    }

    struct Linear;
    impl CustomSources for Linear {
        fn terms(&self, phi: f64, _sigma: f64) -> SourceTerms {
            SourceTerms {
                lambda_phi: phi,
                ..Default::default()
            }
        }
    }

    #[test]
    fn custom_sources() {
        let s = SourceModel::custom(Arc::new(Linear));
        assert_eq!(s.evaluate(0.25, 1.0, 1.0, 1.0, 1.0), (0.25, 0.0));
        assert!(s.spec().is_none());
    }
}
