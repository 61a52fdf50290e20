//! Time integration of the Galerkin system.

mod dense;
mod rhs;
mod run;
mod state;
mod stepper;

pub use dense::DenseGalerkinOperators;
pub use rhs::{rhs, rhs_from_derived, Rhs};
pub use run::{run, run_steps, step_count, NullObserver, Observer, Trajectory};
pub use state::{project_initial_data, SimState};
pub use stepper::{Forcing, Scheme, Stepper, StepperConfig, STABILIZATION_RANGE};
