use super::energy::{energy_from_derived, EnergyBreakdown};
use crate::dynamics::{Observer, SimState};
use crate::error::{Error, Result};
use crate::model::{Derived, Model};
use crate::spectral::Discretization;

/// Norms of one state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormSet {
    pub phi_h1: f64,
    pub sigma_l2: f64,
    pub mu_h1: f64,
    pub grad_mu: f64,
    pub grad_sigma: f64,
    pub v_l2: f64,
    /// `K^{−1/2}‖v‖`.
    pub v_scaled: f64,
    pub p_h1: f64,
    pub sigma_boundary: f64,
    /// `‖∇v‖`.
    pub dv_l2: f64,
}

/// Time integrals (trapezoid over the recorded states) of squared norms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulators {
    pub dissipation: f64,
    pub grad_mu2: f64,
    pub grad_sigma2: f64,
    pub v2: f64,
    pub sigma_boundary2: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub t: f64,
    pub energy: EnergyBreakdown,
    /// `∫φ` and `∫σ`.
    pub mass_phi: f64,
    pub mass_sigma: f64,
    /// Mass rates the scheme applies: `∫Γ_φ` and `−∫S + b∫(σ∞ − σ)` on the boundary.
    pub mass_rate_phi: f64,
    pub mass_rate_sigma: f64,
    /// `∫Γ_v`.
    pub volume_source_integral: f64,
    pub norms: NormSet,
    pub accumulated: Accumulators,
    /// `‖(α, γ)‖`, the scale of the mass-law residuals.
    pub state_norm: f64,
    /// Residuals against the previous record; `NaN` when not defined.
    pub energy_residual: f64,
    pub mass_residual_phi: f64,
    pub mass_residual_sigma: f64,
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 42] = [
        "step",
        "time",
        "E_total",
        "E_potential",
        "E_interface",
        "E_nutrient",
        "E_chemotaxis",
        "diss_mu",
        "diss_sigma",
        "diss_darcy",
        "diss_boundary",
        "work_growth",
        "work_consumption",
        "work_volume",
        "work_boundary",
        "mass_phi",
        "mass_sigma",
        "mass_rate_phi",
        "mass_rate_sigma",
        "volume_source_integral",
        "phi_h1",
        "sigma_l2",
        "mu_h1",
        "grad_mu_l2",
        "grad_sigma_l2",
        "v_l2",
        "v_l2_scaled",
        "p_h1",
        "sigma_l2_boundary",
        "grad_v_l2",
        "acc_dissipation",
        "acc_grad_mu2",
        "acc_grad_sigma2",
        "acc_v2",
        "acc_sigma_boundary2",
        "state_norm",
        "energy_residual",
        "mass_residual_phi",
        "mass_residual_sigma",
        "dissipation",
        "source_work",
        "energy_rate",
    ];

    /// Values in [`Self::COLUMNS`] order. The step is stored as a float, which is
    /// exact below 2⁵³.
    pub fn to_row(&self) -> Vec<f64> {
        let e = &self.energy;
        let n = &self.norms;
        let a = &self.accumulated;
        vec![
            self.step as f64,
            self.t,
            e.total,
            e.potential,
            e.interface,
            e.nutrient,
            e.chemotaxis,
            e.diss_mu,
            e.diss_sigma,
            e.diss_darcy,
            e.diss_boundary,
            e.work_growth,
            e.work_consumption,
            e.work_volume,
            e.work_boundary,
            self.mass_phi,
            self.mass_sigma,
            self.mass_rate_phi,
            self.mass_rate_sigma,
            self.volume_source_integral,
            n.phi_h1,
            n.sigma_l2,
            n.mu_h1,
            n.grad_mu,
            n.grad_sigma,
            n.v_l2,
            n.v_scaled,
            n.p_h1,
            n.sigma_boundary,
            n.dv_l2,
            a.dissipation,
            a.grad_mu2,
            a.grad_sigma2,
            a.v2,
            a.sigma_boundary2,
            self.state_norm,
            self.energy_residual,
            self.mass_residual_phi,
            self.mass_residual_sigma,
            e.dissipation(),
            e.source_work(),
            e.rate(),
        ]
    }

    /// Inverse of [`Self::to_row`]; the three trailing derived columns are ignored.
    pub fn from_row(row: &[f64]) -> Result<Self> {
        if row.len() != Self::COLUMNS.len() {
            return Err(Error::DimensionMismatch(format!(
                "diagnostics row has {} values, expected {}",
                row.len(),
                Self::COLUMNS.len()
            )));
        }
        let step = row[0];
        if !(step >= 0.0 && step.fract() == 0.0) {
            return Err(Error::InvalidParameter(format!("invalid step value {step}")));
        }
        Ok(DiagnosticsRecord {
            step: step as u64,
            t: row[1],
            energy: EnergyBreakdown {
                total: row[2],
                potential: row[3],
                interface: row[4],
                nutrient: row[5],
                chemotaxis: row[6],
                diss_mu: row[7],
                diss_sigma: row[8],
                diss_darcy: row[9],
                diss_boundary: row[10],
                work_growth: row[11],
                work_consumption: row[12],
                work_volume: row[13],
                work_boundary: row[14],
            },
            mass_phi: row[15],
            mass_sigma: row[16],
            mass_rate_phi: row[17],
            mass_rate_sigma: row[18],
            volume_source_integral: row[19],
            norms: NormSet {
                phi_h1: row[20],
                sigma_l2: row[21],
                mu_h1: row[22],
                grad_mu: row[23],
                grad_sigma: row[24],
                v_l2: row[25],
                v_scaled: row[26],
                p_h1: row[27],
                sigma_boundary: row[28],
                dv_l2: row[29],
            },
            accumulated: Accumulators {
                dissipation: row[30],
                grad_mu2: row[31],
                grad_sigma2: row[32],
                v2: row[33],
                sigma_boundary2: row[34],
            },
            state_norm: row[35],
            energy_residual: row[36],
            mass_residual_phi: row[37],
            mass_residual_sigma: row[38],
        })
    }

    /// Bitwise equality, so that `NaN` placeholders compare equal.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.to_row()
            .iter()
            .zip(other.to_row())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn h1(basis: &crate::spectral::SpectralBasis, c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, v)| (1.0 + basis.eigenvalue(j)) * v * v)
        .sum::<f64>()
        .sqrt()
}

/// Norms and balances of `state`, without the fields that need a previous record.
pub fn snapshot_record(model: &Model, disc: &Discretization, state: &SimState, d: &Derived) -> DiagnosticsRecord {
    let p = &model.params;
    let chi = model.chi();
    let basis = &disc.basis;
    let grid = disc.grid();
    let (alpha, gamma) = (&state.alpha.coeffs, &state.gamma.coeffs);
    let energy = energy_from_derived(model, disc, state, d);
    let sq = disc.domain().measure().sqrt();
    let bd = &disc.boundary;
    let mass_rate_phi = grid.integrate_values(&d.gamma_phi);
    let mass_rate_sigma = -grid.integrate_values(&d.consumption)
        + p.boundary_exchange
            * (model.supply.at(state.t) * disc.domain().boundary_measure() - bd.integral(gamma));
    let v2 = if model.has_flow() {
        grid.integrate_values(
            &(0..d.phi.len())
                .map(|q| d.velocity[0][q].powi(2) + d.velocity[1][q].powi(2))
                .collect::<Vec<_>>(),
        )
    } else {
        0.0
    };
    let v_l2 = v2.sqrt();
    let norms = NormSet {
        phi_h1: h1(basis, alpha),
        sigma_l2: gamma.iter().map(|g| g * g).sum::<f64>().sqrt(),
        mu_h1: h1(basis, &d.beta),
        grad_mu: d
            .beta
            .iter()
            .enumerate()
            .map(|(j, b)| basis.eigenvalue(j) * b * b)
            .sum::<f64>()
            .sqrt(),
        grad_sigma: gamma
            .iter()
            .enumerate()
            .map(|(j, g)| basis.eigenvalue(j) * g * g)
            .sum::<f64>()
            .sqrt(),
        v_l2,
        v_scaled: if model.has_flow() { v_l2 / p.permeability.sqrt() } else { 0.0 },
        p_h1: h1(&disc.pressure_basis, &d.pressure),
        sigma_boundary: bd.bilinear(gamma, gamma).max(0.0).sqrt(),
        dv_l2: if model.has_flow() { velocity_gradient(model, disc, alpha, d, chi) } else { 0.0 },
    };
    DiagnosticsRecord {
        step: state.step,
        t: state.t,
        energy,
        mass_phi: alpha[0] * sq,
        mass_sigma: gamma[0] * sq,
        mass_rate_phi,
        mass_rate_sigma,
        volume_source_integral: grid.integrate_values(&d.gamma_v_grid),
        norms,
        accumulated: Accumulators::default(),
        state_norm: state.norm(),
        energy_residual: f64::NAN,
        mass_residual_phi: f64::NAN,
        mass_residual_sigma: f64::NAN,
    }
}

/// `‖∇v‖` with `∂_b v_a = −K(∂_a∂_b p − ∂_b F_a)` and `F = (μ + χσ)∇φ`.
fn velocity_gradient(model: &Model, disc: &Discretization, alpha: &[f64], d: &Derived, chi: f64) -> f64 {
    let k = model.params.permeability;
    let hp = disc.pressure.hessian_raw(&d.pressure);
    let hphi = disc.transform.hessian_raw(alpha);
    let n = d.phi.len();
    let dims = disc.domain().dim();
    let mut dens = vec![0.0; n];
    for q in 0..n {
        let s = d.mu[q] + chi * d.sigma[q];
        let gs = [
            d.grad_mu[0][q] + chi * d.grad_sigma[0][q],
            d.grad_mu[1][q] + chi * d.grad_sigma[1][q],
        ];
        let h = |a: usize, b: usize, m: &[Vec<f64>; 3]| match (a, b) {
            (0, 0) => m[0][q],
            (1, 1) => m[2][q],
            _ => m[1][q],
        };
        for a in 0..dims {
            for b in 0..dims {
                let df = gs[b] * d.grad_phi[a][q] + s * h(a, b, &hphi);
                let dv = -k * (h(a, b, &hp) - df);
                dens[q] += dv * dv;
            }
        }
    }
    disc.grid().integrate_values(&dens).sqrt()
}

/// Observer that turns every observed state into a [`DiagnosticsRecord`],
/// carrying accumulators and residuals from one record to the next.
pub struct Recorder<'a> {
    model: &'a Model,
    disc: &'a Discretization,
    pub records: Vec<DiagnosticsRecord>,
    last: Option<DiagnosticsRecord>,
    sink: Option<Box<dyn FnMut(&DiagnosticsRecord) -> Result<()> + 'a>>,
}

impl<'a> Recorder<'a> {
    pub fn new(model: &'a Model, disc: &'a Discretization) -> Self {
        Recorder {
            model,
            disc,
            records: Vec::new(),
            last: None,
            sink: None,
        }
    }

    /// Continue after `last`, e.g. from a checkpoint. A state at the same step
    /// as `last` is not recorded again.
    pub fn resume(model: &'a Model, disc: &'a Discretization, last: DiagnosticsRecord) -> Self {
        Recorder {
            last: Some(last),
            ..Self::new(model, disc)
        }
    }

    /// Forward each record to `sink` as well as keeping it.
    pub fn with_sink(mut self, sink: impl FnMut(&DiagnosticsRecord) -> Result<()> + 'a) -> Self {
        self.sink = Some(Box::new(sink));
        self
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.last.as_ref()
    }

    pub fn into_records(self) -> Vec<DiagnosticsRecord> {
        self.records
    }
}

impl Observer for Recorder<'_> {
    fn observe(&mut self, state: &SimState, derived: &Derived) -> Result<()> {
        if self.last.as_ref().is_some_and(|l| l.step == state.step) {
            return Ok(());
        }
        let mut r = snapshot_record(self.model, self.disc, state, derived);
        if let Some(prev) = &self.last {
            let h = r.t - prev.t;
            let trap = |a: f64, b: f64| 0.5 * h * (a + b);
            let (pa, pn, e, n) = (&prev.accumulated, &prev.norms, &r.energy, &r.norms);
            r.accumulated = Accumulators {
                dissipation: pa.dissipation + trap(prev.energy.dissipation(), e.dissipation()),
                grad_mu2: pa.grad_mu2 + trap(pn.grad_mu.powi(2), n.grad_mu.powi(2)),
                grad_sigma2: pa.grad_sigma2 + trap(pn.grad_sigma.powi(2), n.grad_sigma.powi(2)),
                v2: pa.v2 + trap(pn.v_l2.powi(2), n.v_l2.powi(2)),
                sigma_boundary2: pa.sigma_boundary2
                    + trap(pn.sigma_boundary.powi(2), n.sigma_boundary.powi(2)),
            };
            r.energy_residual = (e.total - prev.energy.total) - trap(prev.energy.rate(), e.rate());
            if r.step == prev.step + 1 {
                let scale = 1.0 + prev.state_norm.max(r.state_norm);
                r.mass_residual_phi = (r.mass_phi - prev.mass_phi - h * prev.mass_rate_phi) / scale;
                r.mass_residual_sigma = (r.mass_sigma - prev.mass_sigma - h * prev.mass_rate_sigma) / scale;
            }
        }
        if let Some(sink) = &mut self.sink {
            sink(&r)?;
        }
        self.last = Some(r);
        self.records.push(r);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{project_initial_data, run, Stepper, StepperConfig};
    use crate::model::{InitialProfile, ModelParams, SourceModel};
    use crate::spectral::Domain;

    #[test]
    fn row_round_trip() {
        let mut r = DiagnosticsRecord {
            step: 17,
            t: 0.017,
            ..Default::default()
        };
        r.energy.total = 1.25;
        r.norms.p_h1 = 3.5;
        r.energy_residual = f64::NAN;
        let back = DiagnosticsRecord::from_row(&r.to_row()).unwrap();
        assert!(back.bitwise_eq(&r));
        assert_eq!(DiagnosticsRecord::COLUMNS.len(), r.to_row().len());
    }

    #[test]
    fn equilibrium_run_has_no_dissipation() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 4).unwrap();
        let m = Model::new(ModelParams {
            boundary_exchange: 0.0,
            ..Default::default()
        });
        let s0 = project_initial_data(
            &InitialProfile::Constant { value: 1.0 },
            &InitialProfile::Constant { value: 0.0 },
            &d,
            0,
        )
        .unwrap();
        let mut st = Stepper::new(&m, &d, StepperConfig::with_dt(1e-2)).unwrap();
        let mut rec = Recorder::new(&m, &d);
        run(&mut st, s0, 0.05, 1, &mut rec).unwrap();
        assert_eq!(rec.records.len(), 6);
        for r in &rec.records[1..] {
            assert_eq!(r.accumulated, Accumulators::default());
            assert!(r.energy_residual.abs() < 1e-13);
            assert!(r.mass_residual_phi.abs() < 1e-15);
        }
    }

    #[test]
    fn mass_laws_with_sources() {
        let d = Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 6).unwrap();
        let m = Model::new(ModelParams::default()).with_sources(SourceModel::proliferation(1.0, 0.5, 1.0));
        let s0 = project_initial_data(
            &InitialProfile::RandomSeeded {
                mean: 0.0,
                amplitude: 0.3,
                cutoff: 6,
                seed: None,
            },
            &InitialProfile::Constant { value: 0.8 },
            &d,
            5,
        )
        .unwrap();
        let mut st = Stepper::new(&m, &d, StepperConfig::with_dt(1e-3)).unwrap();
        let mut rec = Recorder::new(&m, &d);
        run(&mut st, s0, 0.01, 1, &mut rec).unwrap();
        for r in &rec.records[1..] {
            assert!(r.mass_residual_phi.abs() < 1e-12, "{}", r.mass_residual_phi);
            assert!(r.mass_residual_sigma.abs() < 1e-12, "{}", r.mass_residual_sigma);
            assert!(r.accumulated.dissipation > 0.0);
        }
    }
}
