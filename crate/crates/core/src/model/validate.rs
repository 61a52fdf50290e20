use std::fmt;

use serde::{Deserialize, Serialize};

use super::potential::sample;
use super::Model;
use crate::spectral::Domain;

/// Sampling box for the pointwise checks: `φ, σ, μ ∈ [lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleBox {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            lo: -3.0,
            hi: 3.0,
            points: 41,
        }
    }
}

impl SampleBox {
    fn values(&self) -> Vec<f64> {
        sample(self.lo, self.hi, self.points).collect()
    }
}

/// Which a-priori-estimate regime the data fall into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `Θ_φ ≥ 0` with a potential of quadratic growth.
    QuadraticPotential,
    /// `Θ_φ ≥ R₅ > 0` with `|Ψ''| ≤ R₆(1 + |t|^q)`, `q < 4`.
    PositiveUptake,
    /// No volume source and `S·N_σ − Γ_φ·μ ≥ 0`.
    SignCondition,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::QuadraticPotential => "case 1: nonnegative uptake, quadratic potential",
            Regime::PositiveUptake => "case 2: uptake bounded below by R5 > 0",
            Regime::SignCondition => "sign condition S*N_sigma - Gamma_phi*mu >= 0",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Sample point `(φ, σ[, μ])` at which a pointwise check failed.
    pub witness: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub regime: Option<Regime>,
    /// `R₀` from sampling the source functions.
    pub r0: f64,
    /// `inf Θ_φ` on the sample box.
    pub r5: f64,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.regime.is_some() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "[{mark}] {:<28} {}", c.name, c.detail)?;
            if let Some(w) = &c.witness {
                write!(f, " (witness {w:?})")?;
            }
            writeln!(f)?;
        }
        match self.regime {
            Some(r) => writeln!(f, "regime: {r}")?,
            None => writeln!(f, "regime: none of the admissible regimes applies")?,
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Sample-based audit of the structural assumptions on the model data.
pub fn validate_assumptions(model: &Model, domain: &Domain, range: SampleBox) -> ValidationReport {
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let p = &model.params;
    let chi = model.chi();

    let consts = p.check(model.flags);
    checks.push(Check {
        name: "constants positive",
        passed: consts.is_ok(),
        detail: match &consts {
            Ok(()) => format!(
                "A={} B={} K={} D={} chi={} b={}",
                p.potential_weight,
                p.gradient_weight,
                p.permeability,
                p.diffusivity,
                p.chemotaxis,
                p.boundary_exchange
            ),
            Err(e) => e.to_string(),
        },
        witness: None,
    });
    if p.boundary_exchange == 0.0 {
        notes.push("b = 0: nutrient boundary exchange switched off (pure no-flux)".into());
    }
    if model.flags.no_flow {
        notes.push("no-flow limit system: v = 0, Darcy subsystem dropped".into());
    }
    if model.flags.no_chemotaxis {
        notes.push("no-chemotaxis limit system: every chi term dropped".into());
    }

    let mob = model
        .mobility
        .check("m")
        .and_then(|_| model.nutrient_mobility.check("n"));
    let (m0, m1) = model.mobility.bounds();
    let (n0, n1) = model.nutrient_mobility.bounds();
    checks.push(Check {
        name: "mobility bounds",
        passed: mob.is_ok(),
        detail: format!("m in [{m0}, {m1}], n in [{n0}, {n1}]"),
        witness: None,
    });

    // Source structure on the (φ, σ) box.
    let vals = range.values();
    let mut r0 = 0.0_f64;
    let mut r5 = f64::INFINITY;
    let mut negative_theta = None;
    for &phi in &vals {
        for &sigma in &vals {
            let t = model.sources.terms(phi, sigma, p.diffusivity, chi);
            let lin = 1.0 + phi.abs() + sigma.abs();
            r0 = r0
                .max(t.theta_phi.abs())
                .max(t.theta_s.abs())
                .max(t.lambda_phi.abs() / lin)
                .max(t.lambda_s.abs() / lin);
            r5 = r5.min(t.theta_phi);
            if t.theta_phi < 0.0 && negative_theta.is_none() {
                negative_theta = Some(vec![phi, sigma]);
            }
        }
    }
    checks.push(Check {
        name: "source growth",
        passed: r0.is_finite(),
        detail: format!("R0 = {r0:.6}"),
        witness: None,
    });
    checks.push(Check {
        name: "uptake nonnegative",
        passed: negative_theta.is_none(),
        detail: format!("inf Theta_phi = {r5:.6}"),
        witness: negative_theta,
    });
    if let Some(super::SourceSpec::Hawkins { .. } | super::SourceSpec::Proliferation { .. }) =
        model.sources.spec()
    {
        notes.push(
            "source preset uses h(phi) = (1 + clamp(phi, -1, 1))/2, one admissible interpolation"
                .into(),
        );
    }

    checks.push(Check {
        name: "volume source",
        passed: model.volume_source.has_zero_mean(domain),
        detail: if model.volume_source.is_zero() {
            "Gamma_v = 0".into()
        } else {
            "Gamma_v prescribed with zero mean".into()
        },
        witness: None,
    });

    // Potential: nonnegativity and the quadratic lower bound.
    let g = *model.potential.growth();
    let (psi_min, at) = model.potential.sampled_minimum(10.0);
    checks.push(Check {
        name: "potential nonnegative",
        passed: psi_min >= -1e-14,
        detail: format!("min Psi = {psi_min:.3e}"),
        witness: (psi_min < -1e-14).then(|| vec![at]),
    });
    checks.push(Check {
        name: "potential lower bound",
        passed: true,
        detail: format!("Psi(t) >= {}*t^2 - {:.6}", g.r1, g.r2),
        witness: None,
    });

    let coupling = 2.0 * chi * chi / (p.diffusivity * g.r1);
    checks.push(Check {
        name: "A > 2chi^2/(D R1)",
        passed: p.potential_weight > coupling,
        detail: format!("A = {} vs 2chi^2/(D R1) = {coupling:.6}", p.potential_weight),
        witness: None,
    });

    let regime = if r5 > 0.0 && g.q < 4.0 {
        Some(Regime::PositiveUptake)
    } else if r5 >= 0.0 && model.potential.has_quadratic_growth() {
        Some(Regime::QuadraticPotential)
    } else if model.volume_source.is_zero() {
        let w = sign_condition_witness(model, &vals);
        let ok = w.is_none();
        checks.push(Check {
            name: "sign condition",
            passed: ok,
            detail: "S*N_sigma - Gamma_phi*mu >= 0 on the sample box".into(),
            witness: w,
        });
        ok.then_some(Regime::SignCondition)
    } else {
        None
    };
    if regime == Some(Regime::PositiveUptake) {
        notes.push(format!("R5 = {r5:.6}, q = {}, R6 = {:.6}", g.q, g.r6));
    }

    ValidationReport {
        checks,
        regime,
        r0,
        r5,
        notes,
    }
}

fn sign_condition_witness(model: &Model, vals: &[f64]) -> Option<Vec<f64>> {
    let p = &model.params;
    let chi = model.chi();
    let coarse: Vec<f64> = vals.iter().step_by(2).copied().collect();
    for &phi in &coarse {
        for &sigma in &coarse {
            let n_sigma = p.diffusivity * sigma + chi * (1.0 - phi);
            for &mu in &coarse {
                let (g, s) = model.sources.evaluate(phi, mu, sigma, p.diffusivity, chi);
                if s * n_sigma - g * mu < -1e-12 {
                    return Some(vec![phi, sigma, mu]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, RateProfile, SourceModel};

    fn params(chi: f64) -> ModelParams {
        ModelParams {
            potential_weight: 1.0,
            diffusivity: 1.0,
            chemotaxis: chi,
            ..Default::default()
        }
    }

    #[test]
    fn coupling_condition_holds() {
        let m = Model::new(params(0.2)).with_sources(SourceModel::hawkins(0.1, RateProfile::Constant));
        let r = validate_assumptions(&m, &Domain::interval(1.0).unwrap(), SampleBox::default());
        let c = r.check("A > 2chi^2/(D R1)").unwrap();
        assert!(c.passed, "{}", c.detail);
        assert!(c.detail.contains("0.64"));
        assert_eq!(r.regime, Some(Regime::PositiveUptake));
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn coupling_condition_fails_for_strong_chemotaxis() {
        let m = Model::new(params(10.0)).with_sources(SourceModel::hawkins(0.1, RateProfile::Constant));
        let r = validate_assumptions(&m, &Domain::interval(1.0).unwrap(), SampleBox::default());
        assert!(!r.passed());
        assert_eq!(r.failures().next().unwrap().name, "A > 2chi^2/(D R1)");
    }

    #[test]
    fn interpolated_hawkins_uses_sign_condition() {
        let m = Model::new(params(0.05))
            .with_sources(SourceModel::hawkins(0.1, RateProfile::Interpolated));
        let r = validate_assumptions(&m, &Domain::interval(1.0).unwrap(), SampleBox::default());
        assert_eq!(r.regime, Some(Regime::SignCondition));
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn proliferation_with_quartic_has_no_regime() {
        let m = Model::new(params(0.05)).with_sources(SourceModel::proliferation(1.0, 0.5, 1.0));
        let r = validate_assumptions(&m, &Domain::interval(1.0).unwrap(), SampleBox::default());
        assert!(r.regime.is_none());
        let w = r.check("sign condition").unwrap();
        assert!(!w.passed && w.witness.is_some());
    }
}
