//! Energy balance, mass laws, weak residuals, norms and bounds computed from
//! states and recorded runs.

mod energy;
mod gronwall;
mod norms;
mod pressure;
mod record;
mod residuals;

pub use energy::{energy, energy_from_derived, free_energy, EnergyBreakdown};
pub use gronwall::{energy_gronwall_input, gronwall_envelope, GronwallEnvelope, GronwallInput};
pub use norms::{norm_suite, NormSummary};
pub use pressure::{pressure_reformulations, PressureReformulations};
pub use record::{snapshot_record, Accumulators, DiagnosticsRecord, NormSet, Recorder};
pub use residuals::{
    energy_identity_residual, mass_balance_residuals, weak_residual, weak_residual_max, MassBalance, ResidualSeries,
    WeakEquation,
};
