use super::record::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Space-time norms over a recorded window, time integrals by trapezoid.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormSummary {
    pub phi_linf_h1: f64,
    pub sigma_linf_l2: f64,
    pub sigma_l2_h1: f64,
    pub mu_l2_h1: f64,
    /// `(∫‖p‖_{H¹}^{8/5})^{5/8}`.
    pub p_l85_h1: f64,
    pub v_l2_l2: f64,
    /// `K^{−1/2}‖v‖_{L²(L²)}`.
    pub v_scaled_l2_l2: f64,
    pub dv_l2_l2: f64,
    /// `∫‖∇μ‖²`, `∫‖∇σ‖²`, `∫‖v‖²` and the total dissipation, from the accumulators.
    pub int_grad_mu2: f64,
    pub int_grad_sigma2: f64,
    pub int_v2: f64,
    pub int_dissipation: f64,
}

fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    t.windows(2).zip(f.windows(2)).map(|(t, f)| 0.5 * (t[1] - t[0]) * (f[0] + f[1])).sum()
}

pub fn norm_suite(records: &[DiagnosticsRecord]) -> Result<NormSummary> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InsufficientData("norm suite needs at least one record".into())),
    };
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let series = |f: &dyn Fn(&DiagnosticsRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let sup = |f: &dyn Fn(&DiagnosticsRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let l2 = |f: &dyn Fn(&DiagnosticsRecord) -> f64| trapezoid(&t, &series(&|r| f(r).powi(2))).sqrt();
    let acc = |f: &dyn Fn(&DiagnosticsRecord) -> f64| f(last) - f(first);
    Ok(NormSummary {
        phi_linf_h1: sup(&|r| r.norms.phi_h1),
        sigma_linf_l2: sup(&|r| r.norms.sigma_l2),
        sigma_l2_h1: l2(&|r| r.norms.sigma_l2.hypot(r.norms.grad_sigma)),
        mu_l2_h1: l2(&|r| r.norms.mu_h1),
        p_l85_h1: trapezoid(&t, &series(&|r| r.norms.p_h1.powf(1.6))).powf(0.625),
        v_l2_l2: l2(&|r| r.norms.v_l2),
        v_scaled_l2_l2: l2(&|r| r.norms.v_scaled),
        dv_l2_l2: l2(&|r| r.norms.dv_l2),
        int_grad_mu2: acc(&|r| r.accumulated.grad_mu2),
        int_grad_sigma2: acc(&|r| r.accumulated.grad_sigma2),
        int_v2: acc(&|r| r.accumulated.v2),
        int_dissipation: acc(&|r| r.accumulated.dissipation),
    })
}
