use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the double-well potential `Ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `¼(1 − t²)²`.
    Quartic,
    /// `¼(1 − t²)²` on `[−1, 1]` continued by `(|t| − 1)²`: a C² double well
    /// with quadratic growth.
    Quadratic,
    /// `Σ c_i tⁱ`, coefficients in increasing degree.
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    /// Quadratic lower-bound constant `R₁`; defaults per kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound_rate: Option<f64>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            kind: PotentialKind::Quartic,
            lower_bound_rate: None,
        }
    }
}

/// Growth constants certified by sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBounds {
    /// `Ψ(t) ≥ R₁t² − R₂`.
    pub r1: f64,
    pub r2: f64,
    /// Quadratic-growth constants, present only when `Ψ` grows at most quadratically.
    pub r3: Option<f64>,
    pub r4: Option<f64>,
    /// `|Ψ''(t)| ≤ R₆(1 + |t|^q)`.
    pub r6: f64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    growth: GrowthBounds,
}

const LOWER_BOUND_RANGE: f64 = 10.0;

impl Potential {
    pub fn quartic() -> Self {
        Self::from_spec(&PotentialSpec::default()).expect("quartic preset is admissible")
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        if let PotentialKind::Polynomial { coeffs } = &spec.kind {
            if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter(
                    "polynomial potential needs finite coefficients".into(),
                ));
            }
        }
        let r1 = spec.lower_bound_rate.unwrap_or(match spec.kind {
            PotentialKind::Quartic => 0.125,
            PotentialKind::Quadratic => 0.5,
            PotentialKind::Polynomial { .. } => 0.125,
        });
        if !(r1 > 0.0 && r1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lower_bound_rate must be positive, got {r1}"
            )));
        }
        let mut p = Potential {
            kind: spec.kind.clone(),
            growth: GrowthBounds {
                r1,
                r2: 0.0,
                r3: None,
                r4: None,
                r6: 0.0,
                q: 0.0,
            },
        };
        p.growth = p.certify(r1)?;
        Ok(p)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn growth(&self) -> &GrowthBounds {
        &self.growth
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.kind {
            PotentialKind::Quartic => {
                let s = 1.0 - t * t;
                0.25 * s * s
            }
            PotentialKind::Quadratic => {
                if t.abs() <= 1.0 {
                    let s = 1.0 - t * t;
                    0.25 * s * s
                } else {
                    let s = t.abs() - 1.0;
                    s * s
                }
            }
            PotentialKind::Polynomial { coeffs } => horner(coeffs, t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            PotentialKind::Quartic => t * t * t - t,
            PotentialKind::Quadratic => {
                if t.abs() <= 1.0 {
                    t * t * t - t
                } else {
                    2.0 * (t.abs() - 1.0) * t.signum()
                }
            }
            PotentialKind::Polynomial { coeffs } => horner(&differentiate(coeffs), t),
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match &self.kind {
            PotentialKind::Quartic => 3.0 * t * t - 1.0,
            PotentialKind::Quadratic => {
                if t.abs() <= 1.0 {
                    3.0 * t * t - 1.0
                } else {
                    2.0
                }
            }
            PotentialKind::Polynomial { coeffs } => {
                horner(&differentiate(&differentiate(coeffs)), t)
            }
        }
    }

    pub fn third_derivative(&self, t: f64) -> f64 {
        match &self.kind {
            PotentialKind::Quartic => 6.0 * t,
            PotentialKind::Quadratic => {
                if t.abs() <= 1.0 {
                    6.0 * t
                } else {
                    0.0
                }
            }
            PotentialKind::Polynomial { coeffs } => {
                horner(&differentiate(&differentiate(&differentiate(coeffs))), t)
            }
        }
    }

    /// `sup |Ψ''|` on `[−r, r]`, sampled.
    pub fn max_curvature(&self, r: f64) -> f64 {
        sample(-r, r, 4001)
            .map(|t| self.second_derivative(t).abs())
            .fold(0.0, f64::max)
    }

    /// Whether `Ψ` is bounded by a quadratic at infinity.
    pub fn has_quadratic_growth(&self) -> bool {
        match &self.kind {
            PotentialKind::Quartic => false,
            PotentialKind::Quadratic => true,
            PotentialKind::Polynomial { coeffs } => degree(coeffs) <= 2,
        }
    }

    /// Exponent `q` in the bound on `Ψ''`.
    fn curvature_exponent(&self) -> f64 {
        match &self.kind {
            PotentialKind::Quartic => 2.0,
            PotentialKind::Quadratic => 0.0,
            PotentialKind::Polynomial { coeffs } => degree(coeffs).saturating_sub(2) as f64,
        }
    }

    fn certify(&self, r1: f64) -> Result<GrowthBounds> {
        // Brute-force minimisation of Ψ(t) − R₁t² on [−10, 10]. The minimum must
        // sit strictly inside the window, otherwise the difference may keep
        // decreasing and no R₂ exists.
        let n = 200_001;
        let mut min = f64::INFINITY;
        let mut arg = 0.0;
        for t in sample(-LOWER_BOUND_RANGE, LOWER_BOUND_RANGE, n) {
            let d = self.value(t) - r1 * t * t;
            if d < min {
                min = d;
                arg = t;
            }
        }
        let edge = LOWER_BOUND_RANGE * (1.0 - 1e-3);
        if arg.abs() >= edge || !min.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Ψ(t) − {r1}·t² is not bounded below on the sampled range (minimum at t = {arg})"
            )));
        }
        let q = self.curvature_exponent();
        let mut r6 = 0.0_f64;
        let mut r3 = 0.0_f64;
        let mut r4 = 0.0_f64;
        for t in sample(-LOWER_BOUND_RANGE, LOWER_BOUND_RANGE, 20_001) {
            let a = t.abs();
            r6 = r6.max(self.second_derivative(t).abs() / (1.0 + a.powf(q)));
            r3 = r3.max(self.value(t) / (1.0 + t * t));
            r4 = r4
                .max(self.derivative(t).abs() / (1.0 + a))
                .max(self.second_derivative(t).abs());
        }
        let quad = self.has_quadratic_growth();
        Ok(GrowthBounds {
            r1,
            r2: (-min).max(0.0),
            r3: quad.then_some(r3),
            r4: quad.then_some(r4),
            r6,
            q,
        })
    }

    /// Minimum of `Ψ` on `[−r, r]`, sampled.
    pub fn sampled_minimum(&self, r: f64) -> (f64, f64) {
        sample(-r, r, 4001)
            .map(|t| (self.value(t), t))
            .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
    }
}

pub(crate) fn sample(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| lo + i as f64 * h)
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn differentiate(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| i as f64 * a)
        .collect()
}

fn degree(c: &[f64]) -> usize {
    c.iter().rposition(|&a| a != 0.0).unwrap_or(0)
}
