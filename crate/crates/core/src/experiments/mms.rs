use serde::{Deserialize, Serialize};

use super::rate::{fit_rate, RateFit};
use crate::dynamics::{run_steps, DenseGalerkinOperators, Forcing, NullObserver, Scheme, SimState, Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::{Discretization, Domain, FieldCoeffs, SpectralBasis};

/// `a·e^{−r t}·cos(m_x π x / L_x)·cos(m_y π y / L_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineMode {
    pub amplitude: f64,
    /// Wavenumbers in units of `π/L`; Neumann compatibility needs integers.
    pub modes: [f64; 2],
    #[serde(default)]
    pub decay: f64,
}

/// A sum of separable cosine modes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedField {
    pub terms: Vec<CosineMode>,
}

impl ManufacturedField {
    pub fn new(terms: Vec<CosineMode>) -> Self {
        ManufacturedField { terms }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(vec![CosineMode {
            amplitude: value,
            modes: [0.0, 0.0],
            decay: 0.0,
        }])
    }

    /// Rejects anything with a nonzero normal derivative on the boundary.
    pub fn check(&self, domain: &Domain) -> Result<()> {
        for t in &self.terms {
            for (a, &m) in t.modes.iter().enumerate() {
                if !(m >= 0.0 && m.fract() == 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "wavenumber {m} is not a nonnegative integer: the normal derivative does not vanish"
                    )));
                }
                if a == 1 && domain.dim() == 1 && m != 0.0 {
                    return Err(Error::InvalidParameter("an interval field cannot vary in y".into()));
                }
            }
            if !(t.amplitude.is_finite() && t.decay.is_finite()) {
                return Err(Error::NonFinite("manufactured term".into()));
            }
        }
        Ok(())
    }

    pub fn value(&self, domain: &Domain, t: f64, x: f64, y: f64) -> f64 {
        let [lx, ly] = domain.lengths();
        let pi = std::f64::consts::PI;
        self.terms
            .iter()
            .map(|m| {
                m.amplitude
                    * (-m.decay * t).exp()
                    * (m.modes[0] * pi * x / lx).cos()
                    * (m.modes[1] * pi * y / ly).cos()
            })
            .sum()
    }

    /// Coefficients of the `L²` projection onto `basis` and their time
    /// derivative, plus the squared norm of the part outside the span.
    fn coeffs(&self, basis: &SpectralBasis, t: f64) -> (Vec<f64>, Vec<f64>, f64) {
        let dom = basis.domain();
        let [lx, ly] = dom.lengths();
        let [kx, ky] = basis.modes();
        let mut c = vec![0.0; basis.len()];
        let mut dc = vec![0.0; basis.len()];
        // ‖cos(mπx/L)‖² on [0, L] is L for m = 0, L/2 otherwise.
        let sq = |m: usize, l: f64| if m == 0 { l } else { 0.5 * l };
        let mut outside = Vec::new();
        for term in &self.terms {
            let (mx, my) = (term.modes[0] as usize, term.modes[1] as usize);
            let a = term.amplitude * (-term.decay * t).exp();
            let norm = (sq(mx, lx) * if dom.dim() == 1 { 1.0 } else { sq(my, ly) }).sqrt();
            if mx < kx && my < ky {
                let j = basis.index(mx, my);
                c[j] += a * norm;
                dc[j] -= term.decay * a * norm;
            } else {
                outside.push(((mx, my), a * norm));
            }
        }
        // Terms outside the span may share a mode; merge before squaring.
        outside.sort_by_key(|o| o.0);
        let mut out2 = 0.0;
        let mut i = 0;
        while i < outside.len() {
            let mut s = 0.0;
            let key = outside[i].0;
            while i < outside.len() && outside[i].0 == key {
                s += outside[i].1;
                i += 1;
            }
            out2 += s * s;
        }
        (c, dc, out2)
    }
}

/// `φ*`, `σ*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub phi: ManufacturedField,
    pub sigma: ManufacturedField,
}

impl Manufactured {
    /// `φ* = cos(πx)e^{−t}`, `σ* = ½cos(2πx)e^{−t}` on the unit interval.
    pub fn decaying_cosines() -> Self {
        Manufactured {
            phi: ManufacturedField::new(vec![CosineMode {
                amplitude: 1.0,
                modes: [1.0, 0.0],
                decay: 1.0,
            }]),
            sigma: ManufacturedField::new(vec![CosineMode {
                amplitude: 0.5,
                modes: [2.0, 0.0],
                decay: 1.0,
            }]),
        }
    }

    pub fn check(&self, domain: &Domain) -> Result<()> {
        self.phi.check(domain)?;
        self.sigma.check(domain)
    }

    pub fn state(&self, basis: &SpectralBasis, t: f64, step: u64) -> Result<SimState> {
        let (a, _, _) = self.phi.coeffs(basis, t);
        let (g, _, _) = self.sigma.coeffs(basis, t);
        SimState::new(t, step, FieldCoeffs::from_vec(basis, a)?, FieldCoeffs::from_vec(basis, g)?)
    }

    /// `d/dt` of the projection minus the Galerkin right-hand side at the
    /// projection, with the right-hand side from the dense assembly.
    pub fn forcing(&self, model: &Model, basis: &SpectralBasis) -> Forcing {
        let (me, model, basis) = (self.clone(), model.clone(), basis.clone());
        Forcing::new(move |t| {
            let s = me.state(&basis, t, 0)?;
            let ops = DenseGalerkinOperators::assemble(&model, &basis, &s, 4)?;
            let (ra, rg) = ops.rhs(&model, &s);
            let (_, da, _) = me.phi.coeffs(&basis, t);
            let (_, dg, _) = me.sigma.coeffs(&basis, t);
            Ok((
                da.iter().zip(&ra).map(|(d, r)| d - r).collect(),
                dg.iter().zip(&rg).map(|(d, r)| d - r).collect(),
            ))
        })
    }

    /// `(‖φ_h − φ*‖² + ‖σ_h − σ*‖²)^{1/2}` at `state.t`, exact in the
    /// orthonormal basis.
    pub fn error(&self, state: &SimState) -> f64 {
        let basis = &state.alpha.basis;
        let (a, _, ao) = self.phi.coeffs(basis, state.t);
        let (g, _, go) = self.sigma.coeffs(basis, state.t);
        let d2 = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        (d2(&state.alpha.coeffs, &a) + d2(&state.gamma.coeffs, &g) + ao + go).sqrt()
    }
}

/// Integrate the forced system from the projected data to `t_end` and
/// return the error there.
pub fn manufactured_error(
    model: &Model,
    domain: Domain,
    fields: &Manufactured,
    modes: usize,
    scheme: Scheme,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    fields.check(&domain)?;
    let disc = Discretization::new(domain, modes)?;
    let n = (t_end / dt).round().max(1.0) as u64;
    let config = StepperConfig {
        scheme,
        ..StepperConfig::with_dt(t_end / n as f64)
    };
    let mut stepper = Stepper::new(model, &disc, config)?.with_forcing(fields.forcing(model, &disc.basis));
    let s0 = fields.state(&disc.basis, 0.0, 0)?;
    let traj = run_steps(&mut stepper, s0, n, n, &mut NullObserver)?;
    Ok(fields.error(traj.last().expect("final state recorded")))
}

/// Spatial and temporal error tables with their log-log fits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmsStudy {
    /// `(modes, error)` at a small RK4 step.
    pub spatial: Vec<(usize, f64)>,
    /// `(dt, error)` with the IMEX scheme at the largest mode count.
    pub temporal: Vec<(f64, f64)>,
    /// Absent when fewer than three spatial errors are positive.
    pub space_fit: Option<RateFit>,
    pub time_fit: Option<RateFit>,
}

/// Spatial errors over `orders` (RK4, `dt` at half its stability bound and
/// at most `1e-3`) and temporal errors over `dts` at `max(orders)` modes.
pub fn manufactured_solution_study(
    model: &Model,
    domain: Domain,
    fields: &Manufactured,
    orders: &[usize],
    dts: &[f64],
    t_end: f64,
) -> Result<MmsStudy> {
    fields.check(&domain)?;
    let mut spatial = Vec::new();
    for &k in orders {
        let disc = Discretization::new(domain, k)?;
        let limit = Stepper::new(model, &disc, StepperConfig::with_dt(1e-3))?.rk4_limit();
        let dt = limit.min(2.5e-4) * 0.999;
        let n = (t_end / dt).ceil();
        spatial.push((k, manufactured_error(model, domain, fields, k, Scheme::Rk4Explicit, t_end / n, t_end)?));
    }
    let k = orders.iter().copied().max().unwrap_or(4);
    let temporal = dts
        .iter()
        .map(|&dt| Ok((dt, manufactured_error(model, domain, fields, k, Scheme::Imex1, dt, t_end)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = |x: Vec<f64>, y: Vec<f64>| {
        let keep: Vec<(f64, f64)> = x.into_iter().zip(y).filter(|p| p.1 > 0.0).collect();
        let (x, y): (Vec<f64>, Vec<f64>) = keep.into_iter().unzip();
        fit_rate(&x, &y).ok()
    };
    Ok(MmsStudy {
        space_fit: fit(
            spatial.iter().map(|s| s.0 as f64).collect(),
            spatial.iter().map(|s| s.1).collect(),
        ),
        time_fit: fit(
            temporal.iter().map(|s| s.0).collect(),
            temporal.iter().map(|s| s.1).collect(),
        ),
        spatial,
        temporal,
    })
}

/// The model used by the shipped study: reference coefficients on an
/// interval, polynomial nonlinearities only, so the quadrature is exact.
pub fn reference_mms_model() -> Result<Model> {
    let mut cfg = crate::io::RunConfig::default();
    cfg.domain = Domain::Interval { length: 1.0 };
    cfg.model()
}
