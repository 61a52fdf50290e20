use super::record::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::spectral::SpectralBasis;

/// Samples of `α, β, u, v` on a common time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GronwallInput {
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GronwallEnvelope {
    /// `α(s) + ∫₀ˢ βα exp(∫₀ᵗ β)`.
    pub bound: Vec<f64>,
    /// `u(s) + ∫₀ˢ v`.
    pub monitored: Vec<f64>,
    pub holds: bool,
    /// Smallest `bound − monitored`.
    pub margin: f64,
}

fn trapezoid_cumulative(t: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
        }
        out.push(acc);
    }
    out
}

pub fn gronwall_envelope(g: &GronwallInput) -> Result<GronwallEnvelope> {
    let n = g.times.len();
    if n == 0 || [g.alpha.len(), g.beta.len(), g.u.len(), g.v.len()].iter().any(|&l| l != n) {
        return Err(Error::InsufficientData("Gronwall samples must be nonempty and of equal length".into()));
    }
    if g.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("Gronwall times must increase".into()));
    }
    if let Some(i) = g.beta.iter().position(|&b| !(b >= 0.0)) {
        return Err(Error::InvalidParameter(format!("beta negative at sample {i}")));
    }
    if let Some(i) = g.v.iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("v negative at sample {i}")));
    }
    // βe^{∫β} dt = d(e^{∫β}), so the outer integral is a trapezoid rule in
    // that measure. It is exact whenever α is constant.
    let growth: Vec<f64> = trapezoid_cumulative(&g.times, &g.beta).iter().map(|b| b.exp()).collect();
    let mut acc = 0.0;
    let mut bound = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            acc += 0.5 * (g.alpha[i] + g.alpha[i - 1]) * (growth[i] - growth[i - 1]);
        }
        bound.push(g.alpha[i] + acc);
    }
    let int_v = trapezoid_cumulative(&g.times, &g.v);
    let monitored: Vec<f64> = (0..n).map(|i| g.u[i] + int_v[i]).collect();
    let margin = (0..n).map(|i| bound[i] - monitored[i]).fold(f64::INFINITY, f64::min);
    Ok(GronwallEnvelope {
        holds: margin >= -1e-9,
        bound,
        monitored,
        margin,
    })
}

/// Gronwall data for the energy of a recorded run, with one structural
/// constant `c` in front of every right-hand-side term.
///
/// `u = c₀(‖Ψ(φ)‖_{L¹} + ‖∇φ‖² + ‖σ‖²)` with `c₀ = min(A − 2χ²/(DR₁), B/2, D/4)`,
/// `v = ‖∇μ‖² + ‖∇σ‖² + ‖v‖²/K + (b/2)‖σ‖²_{∂Ω}`,
/// `α = c[(1+b)(1+χ²)(1+T) + ‖Γ_v‖²_{L²(L²)}/K + ‖Ψ(φ₀)‖_{L¹} + ‖φ₀‖²_{H¹} + ‖σ₀‖²]`,
/// `β = c(1+b)(1+χ²)(1 + ‖Γ_v‖⁴)`.
pub fn energy_gronwall_input(
    model: &Model,
    basis: &SpectralBasis,
    records: &[DiagnosticsRecord],
    c: f64,
) -> Result<GronwallInput> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("no records".into()))?;
    let p = &model.params;
    let chi = model.chi();
    let (a, bw, d, b) = (p.potential_weight, p.gradient_weight, p.diffusivity, p.boundary_exchange);
    let r1 = model.potential.growth().r1;
    let c0 = (a - 2.0 * chi * chi / (d * r1)).min(0.5 * bw).min(0.25 * d);
    if !(c0 > 0.0) {
        return Err(Error::Assumption(format!("coercivity constant {c0} is not positive")));
    }
    let psi_l1 = |r: &DiagnosticsRecord| r.energy.potential / a;
    let grad_phi2 = |r: &DiagnosticsRecord| 2.0 * r.energy.interface / bw;
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let t_end = *times.last().expect("nonempty");
    let gv: Vec<f64> = times.iter().map(|&t| model.volume_source.l2_norm(basis, t)).collect();
    let gv2 = gv.iter().map(|g| g * g).collect::<Vec<_>>();
    let gv_l2l2 = trapezoid_cumulative(&times, &gv2).last().copied().unwrap_or(0.0);
    let flow = if model.has_flow() { gv_l2l2 / p.permeability } else { 0.0 };
    let growth = (1.0 + b) * (1.0 + chi * chi);
    let initial = psi_l1(first) + first.norms.phi_h1.powi(2) + first.norms.sigma_l2.powi(2);
    let alpha = c * (growth * (1.0 + t_end) + flow + initial);
    Ok(GronwallInput {
        alpha: vec![alpha; records.len()],
        beta: gv.iter().map(|g| c * growth * (1.0 + g.powi(4))).collect(),
        u: records
            .iter()
            .map(|r| c0 * (psi_l1(r) + grad_phi2(r) + r.norms.sigma_l2.powi(2)))
            .collect(),
        v: records
            .iter()
            .map(|r| {
                r.norms.grad_mu.powi(2)
                    + r.norms.grad_sigma.powi(2)
                    + r.norms.v_scaled.powi(2)
                    + 0.5 * b * r.norms.sigma_boundary.powi(2)
            })
            .collect(),
        times,
    })
}
