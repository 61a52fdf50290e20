use std::sync::Arc;

use super::{SimState, Stepper};
use crate::error::{Error, Result};
use crate::model::Derived;

/// Diagnostics sink called on accepted states. It sees the state read-only.
pub trait Observer {
    fn observe(&mut self, state: &SimState, derived: &Derived) -> Result<()>;
}

impl<F: FnMut(&SimState, &Derived) -> Result<()>> Observer for F {
    fn observe(&mut self, state: &SimState, derived: &Derived) -> Result<()> {
        self(state, derived)
    }
}

/// Observer that records nothing.
pub struct NullObserver;

impl Observer for NullObserver {
    fn observe(&mut self, _: &SimState, _: &Derived) -> Result<()> {
        Ok(())
    }
}

/// States kept along a run.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub snapshots: Vec<SimState>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&SimState> {
        self.snapshots.last()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Number of `dt` steps that reach `t_end` from step 0.
pub fn step_count(t_end: f64, dt: f64) -> Result<u64> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time must be nonnegative, got {t_end}")));
    }
    let n = (t_end / dt).round();
    if (n * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
        return Err(Error::InvalidParameter(format!(
            "final time {t_end} is not a multiple of dt = {dt}"
        )));
    }
    Ok(n as u64)
}

/// Advance `initial` to step `total_steps`, calling `observer` on every
/// `cadence`-th step (and the first and last) and keeping those states.
///
/// Times are `step · dt`, so a run resumed from any intermediate state
/// reproduces the uninterrupted one.
pub fn run_steps(
    stepper: &mut Stepper,
    initial: SimState,
    total_steps: u64,
    cadence: u64,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    let cadence = cadence.max(1);
    let (model, disc) = (stepper.model, stepper.disc);
    let mut state = initial;
    let mut traj = Trajectory::default();
    let record = |s: &mut SimState, traj: &mut Trajectory, obs: &mut dyn Observer| -> Result<Arc<Derived>> {
        let d = s.ensure_derived(model, disc)?;
        obs.observe(s, &d)?;
        traj.snapshots.push(s.clone());
        Ok(d)
    };
    record(&mut state, &mut traj, observer)?;
    while state.step < total_steps {
        state = stepper.step(&state)?;
        if state.step % cadence == 0 || state.step == total_steps {
            record(&mut state, &mut traj, observer)?;
        }
    }
    Ok(traj)
}

/// [`run_steps`] from time 0 to `t_end`.
pub fn run(
    stepper: &mut Stepper,
    initial: SimState,
    t_end: f64,
    cadence: u64,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    let n = step_count(t_end, stepper.config.dt)?;
    run_steps(stepper, initial, n, cadence, observer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{project_initial_data, StepperConfig};
    use crate::model::{InitialProfile, Model, ModelParams, RateProfile, SourceModel};
    use crate::spectral::{Discretization, Domain};

    fn setup() -> (Model, Discretization) {
        (
            Model::new(ModelParams::default()).with_sources(SourceModel::hawkins(0.1, RateProfile::Constant)),
            Discretization::new(Domain::rectangle(1.0, 1.0).unwrap(), 6).unwrap(),
        )
    }

    fn initial(d: &Discretization) -> SimState {
        project_initial_data(
            &InitialProfile::RandomSeeded {
                mean: 0.0,
                amplitude: 0.3,
                cutoff: 6,
                seed: None,
            },
            &InitialProfile::Constant { value: 1.0 },
            d,
            11,
        )
        .unwrap()
    }

    #[test]
    fn zero_final_time_keeps_only_the_initial_state() {
        let (m, d) = setup();
        let mut st = Stepper::new(&m, &d, StepperConfig::with_dt(1e-3)).unwrap();
        let s0 = initial(&d);
        let tr = run(&mut st, s0.clone(), 0.0, 1, &mut NullObserver).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.snapshots[0], s0);
    }

    #[test]
    fn cadence_and_times() {
        let (m, d) = setup();
        let mut st = Stepper::new(&m, &d, StepperConfig::with_dt(1e-3)).unwrap();
        let mut seen = Vec::new();
        let mut obs = |s: &SimState, _: &Derived| {
            seen.push(s.step);
            Ok(())
        };
        let tr = run(&mut st, initial(&d), 0.01, 4, &mut obs).unwrap();
        assert_eq!(seen, vec![0, 4, 8, 10]);
        assert_eq!(tr.times(), vec![0.0, 4e-3, 8e-3, 10.0 * 1e-3]);
        assert!(step_count(0.0105, 1e-3).is_err());
    }

    #[test]
    fn runs_are_deterministic_and_resumable() {
        let (m, d) = setup();
        let go = |s: SimState, n: u64| {
            let mut st = Stepper::new(&m, &d, StepperConfig::with_dt(1e-3)).unwrap();
            run_steps(&mut st, s, n, 1, &mut NullObserver).unwrap()
        };
        let a = go(initial(&d), 20);
        let b = go(initial(&d), 20);
        assert_eq!(a.snapshots, b.snapshots);
        let half = go(initial(&d), 10);
        let resumed = go(half.last().unwrap().clone(), 20);
        assert_eq!(resumed.last(), a.last());
    }
}
