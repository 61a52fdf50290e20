use super::record::DiagnosticsRecord;
use crate::dynamics::{rhs, Trajectory};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::Discretization;

/// A residual time series with its summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSeries {
    /// `(t_n, r_n)`.
    pub values: Vec<(f64, f64)>,
    pub max_abs: f64,
    /// `Σ |r_n|` for balances already integrated over a step, `Σ h_n |r_n|` otherwise.
    pub integrated: f64,
}

impl ResidualSeries {
    fn from_values(values: Vec<(f64, f64)>, weights: &[f64]) -> Self {
        let max_abs = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
        let integrated = values.iter().zip(weights).map(|(v, w)| w * v.1.abs()).sum();
        ResidualSeries {
            values,
            max_abs,
            integrated,
        }
    }
}

/// `r_n = E(t_{n+1}) − E(t_n) − (h/2)(Q_n + Q_{n+1})` with `Q = dE/dt` from
/// the dissipation, source-work and boundary-work terms.
pub fn energy_identity_residual(records: &[DiagnosticsRecord]) -> Result<ResidualSeries> {
    if records.len() < 2 {
        return Err(Error::InsufficientData("energy identity needs at least two records".into()));
    }
    let values: Vec<(f64, f64)> = records
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let h = b.t - a.t;
            let r = (b.energy.total - a.energy.total) - 0.5 * h * (a.energy.rate() + b.energy.rate());
            (b.t, r)
        })
        .collect();
    let ones = vec![1.0; values.len()];
    Ok(ResidualSeries::from_values(values, &ones))
}

/// Per-step residuals of the two mass laws and the values of `∫Γ_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassBalance {
    /// Relative to `1 + ‖state‖`.
    pub phi: ResidualSeries,
    pub sigma: ResidualSeries,
    pub volume_source: Vec<f64>,
}

/// Only pairs of consecutive steps enter the mass laws.
pub fn mass_balance_residuals(records: &[DiagnosticsRecord]) -> Result<MassBalance> {
    let pairs: Vec<_> = records.windows(2).filter(|w| w[1].step == w[0].step + 1).collect();
    if pairs.is_empty() {
        return Err(Error::InsufficientData("mass balance needs consecutive steps".into()));
    }
    let law = |pick: &dyn Fn(&DiagnosticsRecord) -> (f64, f64)| {
        let values: Vec<(f64, f64)> = pairs
            .iter()
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let (ma, rate) = pick(a);
                let (mb, _) = pick(b);
                let scale = 1.0 + a.state_norm.max(b.state_norm);
                (b.t, (mb - ma - (b.t - a.t) * rate) / scale)
            })
            .collect();
        let ones = vec![1.0; values.len()];
        ResidualSeries::from_values(values, &ones)
    };
    Ok(MassBalance {
        phi: law(&|r| (r.mass_phi, r.mass_rate_phi)),
        sigma: law(&|r| (r.mass_sigma, r.mass_rate_sigma)),
        volume_source: records.iter().map(|r| r.volume_source_integral).collect(),
    })
}

/// The five relations of the weak formulation, tested with `w_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeakEquation {
    /// Evolution of `φ`.
    Phi,
    /// Definition of `μ`.
    Mu,
    /// Evolution of `σ`.
    Sigma,
    /// Pressure equation.
    Pressure,
    /// Darcy's law, tested with `w_j e_x` and `w_j e_y`.
    Velocity,
}

impl WeakEquation {
    pub fn is_evolution(self) -> bool {
        matches!(self, WeakEquation::Phi | WeakEquation::Sigma)
    }
}

/// Residual vectors over every test function, one per snapshot (algebraic
/// relations) or per pair of consecutive steps (evolution relations), with
/// the time and weight of each.
fn weak_residual_vectors(
    model: &Model,
    disc: &Discretization,
    traj: &Trajectory,
    eq: WeakEquation,
) -> Result<Vec<(f64, f64, Vec<f64>)>> {
    let tr = &disc.transform;
    let p = &model.params;
    let chi = model.chi();
    let mut out = Vec::new();
    if eq.is_evolution() {
        for w in traj.snapshots.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.step != a.step + 1 {
                continue;
            }
            let h = b.t - a.t;
            let r = rhs(model, disc, a)?;
            let (new, old, rate) = match eq {
                WeakEquation::Phi => (&b.alpha.coeffs, &a.alpha.coeffs, &r.dalpha),
                _ => (&b.gamma.coeffs, &a.gamma.coeffs, &r.dgamma),
            };
            let res = (0..new.len()).map(|j| (new[j] - old[j]) / h - rate[j]).collect();
            out.push((a.t, h, res));
        }
        if out.is_empty() {
            return Err(Error::InsufficientData("evolution residual needs consecutive steps".into()));
        }
        return Ok(out);
    }
    let n = disc.basis.len();
    for s in &traj.snapshots {
        let d = s.derived(model, disc)?;
        let res: Vec<f64> = match eq {
            WeakEquation::Mu => {
                let dpsi: Vec<f64> = d.phi.iter().map(|&f| model.potential.derivative(f)).collect();
                let lap = tr.divergence_raw(&d.grad_phi[0], &d.grad_phi[1]);
                let (mu, psi, sigma) = (tr.analyze_raw(&d.mu), tr.analyze_raw(&dpsi), tr.analyze_raw(&d.sigma));
                (0..n)
                    .map(|j| mu[j] - p.potential_weight * psi[j] + p.gradient_weight * lap[j] + chi * sigma[j])
                    .collect()
            }
            WeakEquation::Pressure if model.has_flow() => {
                let gp = disc.pressure.gradient_raw(&d.pressure);
                let lap_p = tr.divergence_raw(&gp[0], &gp[1]);
                let div_f = tr.divergence_raw(&d.forcing[0], &d.forcing[1]);
                let gv = tr.analyze_raw(&d.gamma_v_grid);
                (0..n).map(|j| -lap_p[j] - gv[j] / p.permeability + div_f[j]).collect()
            }
            WeakEquation::Velocity if model.has_flow() => {
                let gp = disc.pressure.gradient_raw(&d.pressure);
                let comp: Vec<Vec<f64>> = (0..2)
                    .map(|a| {
                        let f: Vec<f64> = (0..d.phi.len())
                            .map(|q| d.velocity[a][q] + p.permeability * (gp[a][q] - d.forcing[a][q]))
                            .collect();
                        tr.analyze_raw(&f)
                    })
                    .collect();
                (0..n).map(|j| comp[0][j].abs().max(comp[1][j].abs())).collect()
            }
            _ => vec![0.0; n],
        };
        out.push((s.t, 1.0, res));
    }
    Ok(out)
}

/// Plug the stored trajectory into one weak relation tested with `w_j`.
///
/// Evolution relations use forward differences between consecutive steps and
/// report `Σ h|r|`; algebraic relations are evaluated at every snapshot.
pub fn weak_residual(
    model: &Model,
    disc: &Discretization,
    traj: &Trajectory,
    j: usize,
    eq: WeakEquation,
) -> Result<ResidualSeries> {
    if j >= disc.basis.len() {
        return Err(Error::InvalidParameter(format!(
            "test index {j} out of range for {} modes",
            disc.basis.len()
        )));
    }
    let v = weak_residual_vectors(model, disc, traj, eq)?;
    let weights: Vec<f64> = v.iter().map(|x| x.1).collect();
    Ok(ResidualSeries::from_values(v.into_iter().map(|(t, _, r)| (t, r[j])).collect(), &weights))
}

/// As [`weak_residual`] with `max_j |r_j|` over every test function.
pub fn weak_residual_max(
    model: &Model,
    disc: &Discretization,
    traj: &Trajectory,
    eq: WeakEquation,
) -> Result<ResidualSeries> {
    let v = weak_residual_vectors(model, disc, traj, eq)?;
    let weights: Vec<f64> = v.iter().map(|x| x.1).collect();
    let values = v
        .into_iter()
        .map(|(t, _, r)| (t, r.iter().fold(0.0, |m: f64, x| m.max(x.abs()))))
        .collect();
    Ok(ResidualSeries::from_values(values, &weights))
}
