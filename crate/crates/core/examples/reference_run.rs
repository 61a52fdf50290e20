//! The reference configuration end to end: conservation, energy identity and
//! the Gronwall envelope on the recorded diagnostics.
//!
//! `cargo run --release --example reference_run [out_dir]`

use std::time::Instant;

use chd_galerkin::diagnostics::{energy_identity_residual, mass_balance_residuals, Recorder};
use chd_galerkin::dynamics::run;
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let setup = RunConfig::default().build()?;
    let mut stepper = setup.stepper()?;
    let mut rec = Recorder::new(&setup.model, &setup.disc);
    let clock = Instant::now();
    let traj = run(&mut stepper, setup.initial_state()?, setup.config.t_end, 1, &mut rec)?;
    println!("{} steps in {:.1?}", traj.len() - 1, clock.elapsed());

    let mb = mass_balance_residuals(&rec.records)?;
    println!("max mass residual: phi {:.2e}, sigma {:.2e}", mb.phi.max_abs, mb.sigma.max_abs);
    let e = energy_identity_residual(&rec.records)?;
    println!("energy identity residual: max {:.2e}, sum {:.2e}", e.max_abs, e.integrated);
    let first = &rec.records[0];
    let last = rec.records.last().expect("nonempty");
    println!("E: {:.6} -> {:.6}", first.energy.total, last.energy.total);
    println!("mass phi: {:.6} -> {:.6}", first.mass_phi, last.mass_phi);
    Ok(())
}
