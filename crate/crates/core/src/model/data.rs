use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Domain, FieldCoeffs, QuadratureGrid, SpectralBasis, Transform};

/// Far-field nutrient level on the boundary, uniform in space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundarySupply {
    Constant { value: f64 },
    /// Linear ramp from `start` to `end` over `[0, duration]`, constant after.
    Ramp { start: f64, end: f64, duration: f64 },
}

impl Default for BoundarySupply {
    fn default() -> Self {
        BoundarySupply::Constant { value: 1.0 }
    }
}

impl BoundarySupply {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            BoundarySupply::Constant { value } => value,
            BoundarySupply::Ramp {
                start,
                end,
                duration,
            } => {
                let s = if duration > 0.0 {
                    (t / duration).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                start + (end - start) * s
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        let ok = match *self {
            BoundarySupply::Constant { value } => value.is_finite(),
            BoundarySupply::Ramp {
                start,
                end,
                duration,
            } => start.is_finite() && end.is_finite() && duration >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("boundary supply {self:?}")))
        }
    }
}

/// One separable cosine term `amplitude · cos(mₓπx/Lₓ) · cos(m_yπy/L_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    pub amplitude: f64,
    /// Mode numbers `[mₓ, m_y]`; `m_y` is ignored on an interval.
    pub modes: [usize; 2],
}

impl CosineTerm {
    pub fn eval(&self, domain: &Domain, x: f64, y: f64) -> f64 {
        let [lx, ly] = domain.lengths();
        let cy = if domain.dim() == 1 {
            1.0
        } else {
            (self.modes[1] as f64 * PI * y / ly).cos()
        };
        self.amplitude * (self.modes[0] as f64 * PI * x / lx).cos() * cy
    }

    /// Coefficient of the term on its basis function, or `None` if the
    /// basis does not contain that mode.
    pub fn coefficient(&self, basis: &SpectralBasis) -> Option<(usize, f64)> {
        let modes = basis.modes();
        let my = if basis.domain().dim() == 1 { 0 } else { self.modes[1] };
        if self.modes[0] >= modes[0] || my >= modes[1] {
            return None;
        }
        let lengths = basis.domain().lengths();
        let scale = |axis: usize, m: usize| {
            if basis.domain().is_degenerate(axis) {
                1.0
            } else if m == 0 {
                lengths[axis].sqrt()
            } else {
                (lengths[axis] / 2.0).sqrt()
            }
        };
        Some((
            basis.index(self.modes[0], my),
            self.amplitude * scale(0, self.modes[0]) * scale(1, my),
        ))
    }

    fn is_constant(&self, domain: &Domain) -> bool {
        self.modes[0] == 0 && (domain.dim() == 1 || self.modes[1] == 0)
    }
}

/// Named initial profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Constant {
        value: f64,
    },
    /// `offset + Σ terms`.
    Cosine {
        #[serde(default)]
        offset: f64,
        terms: Vec<CosineTerm>,
    },
    /// Smoothed ellipse: `inside` within the semi-axes around `center`,
    /// `outside` far away, with a tanh transition of the given `width`.
    TanhFront {
        center: [f64; 2],
        semi_axes: [f64; 2],
        width: f64,
        #[serde(default = "one")]
        inside: f64,
        #[serde(default = "minus_one")]
        outside: f64,
    },
    /// `tanh((x − position)/width)` along `x`.
    Planar { position: f64, width: f64 },
    /// `mean` plus uniform random coefficients of size `amplitude` on the
    /// lowest `cutoff` modes per axis, drawn from a seeded stream.
    RandomSeeded {
        #[serde(default)]
        mean: f64,
        amplitude: f64,
        #[serde(default = "default_cutoff")]
        cutoff: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Raw basis coefficients; missing trailing entries are zero.
    Coefficients { values: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

fn default_cutoff() -> usize {
    4
}

impl InitialProfile {
    /// Pointwise value, for profiles that have one.
    pub fn value(&self, domain: &Domain, x: f64, y: f64) -> Option<f64> {
        match self {
            InitialProfile::Constant { value } => Some(*value),
            InitialProfile::Cosine { offset, terms } => {
                Some(offset + terms.iter().map(|t| t.eval(domain, x, y)).sum::<f64>())
            }
            InitialProfile::TanhFront {
                center,
                semi_axes,
                width,
                inside,
                outside,
            } => {
                let dx = (x - center[0]) / semi_axes[0];
                let rho = if domain.dim() == 1 {
                    dx.abs()
                } else {
                    let dy = (y - center[1]) / semi_axes[1];
                    (dx * dx + dy * dy).sqrt()
                };
                let scale = if domain.dim() == 1 {
                    semi_axes[0]
                } else {
                    0.5 * (semi_axes[0] + semi_axes[1])
                };
                let s = 0.5 * (1.0 - ((rho - 1.0) * scale / width).tanh());
                Some(outside + (inside - outside) * s)
            }
            InitialProfile::Planar { position, width } => Some(((x - position) / width).tanh()),
            InitialProfile::RandomSeeded { .. } | InitialProfile::Coefficients { .. } => None,
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            InitialProfile::TanhFront {
                semi_axes, width, ..
            } if !(semi_axes[0] > 0.0 && semi_axes[1] > 0.0 && *width > 0.0) => {
                bad("tanh front needs positive semi-axes and width".into())
            }
            InitialProfile::Planar { width, .. } if *width <= 0.0 => {
                bad("planar front needs a positive width".into())
            }
            InitialProfile::Coefficients { values } if values.iter().any(|v| !v.is_finite()) => {
                Err(Error::NonFinite("initial coefficients".into()))
            }
            _ => Ok(()),
        }
    }

    /// L² projection onto `basis`.
    ///
    /// Closed-form profiles are projected with a fine quadrature grid (at
    /// least four nodes per mode), so smooth non-polynomial data such as a
    /// tanh front is projected without visible aliasing.
    pub fn project(&self, basis: &SpectralBasis, default_seed: u64) -> Result<FieldCoeffs> {
        self.check()?;
        let coeffs = match self {
            InitialProfile::Constant { value } => FieldCoeffs::constant(basis, *value),
            InitialProfile::Cosine { offset, terms } => {
                let mut c = FieldCoeffs::constant(basis, *offset);
                for t in terms {
                    let (i, a) = t.coefficient(basis).ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "cosine term {:?} is not in the {:?}-mode basis",
                            t.modes,
                            basis.modes()
                        ))
                    })?;
                    c.coeffs[i] += a;
                }
                c
            }
            InitialProfile::RandomSeeded {
                mean,
                amplitude,
                cutoff,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                let mut c = FieldCoeffs::constant(basis, *mean);
                for i in 1..basis.len() {
                    let (mx, my) = basis.mode_pair(i);
                    if mx < *cutoff && my < *cutoff {
                        c.coeffs[i] = amplitude * rng.gen_range(-1.0..1.0);
                    }
                }
                c
            }
            InitialProfile::Coefficients { values } => {
                if values.len() > basis.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} coefficients for a basis of {} modes",
                        values.len(),
                        basis.len()
                    )));
                }
                let mut c = FieldCoeffs::zeros(basis);
                c.coeffs[..values.len()].copy_from_slice(values);
                c
            }
            _ => {
                let domain = *basis.domain();
                let fine = (4 * basis.modes()[0]).max(64);
                let grid = QuadratureGrid::new(domain, fine)?;
                let t = Transform::new_resolving(basis, &grid)?;
                let f = grid.sample(|x, y| self.value(&domain, x, y).unwrap_or(0.0));
                t.to_coeffs(&f)?
            }
        };
        if coeffs.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("projected initial data".into()));
        }
        Ok(coeffs)
    }
}

/// Prescribed volume source `Γ_v(x, t)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolumeSource {
    #[default]
    Zero,
    /// `cos(ωt) · Σ terms`; every term must be non-constant.
    Cosine {
        terms: Vec<CosineTerm>,
        #[serde(default)]
        frequency: f64,
    },
}

impl VolumeSource {
    pub fn is_zero(&self) -> bool {
        match self {
            VolumeSource::Zero => true,
            VolumeSource::Cosine { terms, .. } => terms.iter().all(|t| t.amplitude == 0.0),
        }
    }

    /// Whether every term is a non-constant mode.
    pub fn has_zero_mean(&self, domain: &Domain) -> bool {
        match self {
            VolumeSource::Zero => true,
            VolumeSource::Cosine { terms, .. } => terms
                .iter()
                .all(|t| t.amplitude == 0.0 || !t.is_constant(domain)),
        }
    }

    /// Zero mean is part of the admissibility of `Γ_v`.
    pub fn check(&self, basis: &SpectralBasis) -> Result<()> {
        if let VolumeSource::Cosine { terms, frequency } = self {
            if !frequency.is_finite() {
                return Err(Error::InvalidParameter("volume source frequency".into()));
            }
            for t in terms {
                if t.is_constant(basis.domain()) && t.amplitude != 0.0 {
                    return Err(Error::ZeroMeanViolation {
                        value: t.amplitude,
                        tolerance: 0.0,
                    });
                }
                if t.coefficient(basis).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "volume source term {:?} is not in the {:?}-mode basis",
                        t.modes,
                        basis.modes()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Coefficients at time `t`.
    pub fn coefficients(&self, basis: &SpectralBasis, t: f64) -> Vec<f64> {
        let mut c = vec![0.0; basis.len()];
        if let VolumeSource::Cosine { terms, frequency } = self {
            let s = (frequency * t).cos();
            for term in terms {
                if let Some((i, a)) = term.coefficient(basis) {
                    c[i] += s * a;
                }
            }
        }
        c
    }

    /// `‖Γ_v(t)‖_{L²}`.
    pub fn l2_norm(&self, basis: &SpectralBasis, t: f64) -> f64 {
        self.coefficients(basis, t)
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SpectralBasis {
        SpectralBasis::new(Domain::interval(1.0).unwrap(), 8).unwrap()
    }

    #[test]
    fn constant_projection() {
        let b = unit();
        let c = InitialProfile::Constant { value: 0.5 }.project(&b, 0).unwrap();
        assert!((c.coeffs[0] - 0.5).abs() < 1e-15);
        assert!(c.coeffs[1..].iter().all(|v| *v == 0.0));
        let b2 = SpectralBasis::new(Domain::rectangle(2.0, 2.0).unwrap(), 3).unwrap();
        let c = InitialProfile::Constant { value: 0.5 }.project(&b2, 0).unwrap();
        assert!((c.coeffs[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn in_span_cosine_is_exact() {
        let b = unit();
        let p = InitialProfile::Cosine {
            offset: 0.0,
            terms: vec![CosineTerm {
                amplitude: 1.0,
                modes: [1, 0],
            }],
        };
        let c = p.project(&b, 0).unwrap();
        assert!((c.coeffs[1] - 0.5f64.sqrt()).abs() < 1e-15);
        // Same answer through the quadrature path.
        let t = Transform::for_basis(&b);
        let q = t.to_coeffs(&t.grid().sample(|x, _| (PI * x).cos())).unwrap();
        for (a, e) in c.coeffs.iter().zip(&q.coeffs) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    #[test]
    fn tanh_projection_error_decreases() {
        // Oracle: dense midpoint quadrature of the squared projection error.
        let p = InitialProfile::Planar {
            position: 0.5,
            width: 0.1,
        };
        let d = Domain::interval(1.0).unwrap();
        let mut errs = Vec::new();
        for k in [8, 16, 32] {
            let b = SpectralBasis::new(d, k).unwrap();
            let c = p.project(&b, 0).unwrap();
            let n = 20_000;
            let mut e = 0.0;
            for q in 0..n {
                let x = (q as f64 + 0.5) / n as f64;
                let r = p.value(&d, x, 0.0).unwrap() - c.evaluate(x, 0.0);
                e += r * r / n as f64;
            }
            errs.push(e.sqrt());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn random_profile_is_seeded() {
        let b = SpectralBasis::new(Domain::rectangle(1.0, 1.0).unwrap(), 6).unwrap();
        let p = InitialProfile::RandomSeeded {
            mean: 0.1,
            amplitude: 0.2,
            cutoff: 3,
            seed: None,
        };
        assert_eq!(p.project(&b, 7).unwrap(), p.project(&b, 7).unwrap());
        assert_ne!(p.project(&b, 7).unwrap(), p.project(&b, 8).unwrap());
    }

    #[test]
    fn volume_source_mean_zero() {
        let b = unit();
        let ok = VolumeSource::Cosine {
            terms: vec![CosineTerm {
                amplitude: 1.0,
                modes: [1, 0],
            }],
            frequency: 0.0,
        };
        assert!(ok.check(&b).is_ok());
        assert!((ok.coefficients(&b, 0.0)[1] - 0.5f64.sqrt()).abs() < 1e-15);
        let bad = VolumeSource::Cosine {
            terms: vec![CosineTerm {
                amplitude: 1.0,
                modes: [0, 0],
            }],
            frequency: 0.0,
        };
        assert!(matches!(bad.check(&b), Err(Error::ZeroMeanViolation { .. })));
    }

    #[test]
    fn ramp_supply() {
        let s = BoundarySupply::Ramp {
            start: 0.0,
            end: 2.0,
            duration: 1.0,
        };
        assert_eq!(s.at(0.5), 1.0);
        assert_eq!(s.at(3.0), 2.0);
    }
}
