//! Weak-form residuals of each equation along a short run. The evolution
//! residuals compare a forward difference with the explicit right-hand side,
//! so they are first order in `dt` and largest in the stiff high modes.

use chd_galerkin::diagnostics::{weak_residual_max, WeakEquation};
use chd_galerkin::dynamics::{run, NullObserver};
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.modes = 12;
    cfg.t_end = 0.05;
    let setup = cfg.build()?;
    let mut stepper = setup.stepper()?;
    let traj = run(&mut stepper, setup.initial_state()?, cfg.t_end, 1, &mut NullObserver)?;
    for eq in [
        WeakEquation::Phi,
        WeakEquation::Mu,
        WeakEquation::Sigma,
        WeakEquation::Pressure,
        WeakEquation::Velocity,
    ] {
        let r = weak_residual_max(&setup.model, &setup.disc, &traj, eq)?;
        println!("{eq:?}: max {:.2e}, integrated {:.2e}", r.max_abs, r.integrated);
    }
    Ok(())
}
