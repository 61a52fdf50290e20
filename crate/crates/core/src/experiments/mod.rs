//! Parameter sweeps toward the two limit systems, manufactured solutions and
//! rate fits.

pub mod mms;
pub mod rate;
pub mod sweep;

pub use mms::{
    manufactured_error, manufactured_solution_study, reference_mms_model, CosineMode, Manufactured,
    ManufacturedField, MmsStudy,
};
pub use rate::{fit_rate, RateFit};
pub use sweep::{
    difference_norms, run_all, run_member, run_sweep, sweep_vanishing_chemotaxis, sweep_vanishing_permeability,
    thread_count, ComparisonNorm, MemberRun, SweepParameter, SweepRow, SweepSpec, SweepTable,
};
