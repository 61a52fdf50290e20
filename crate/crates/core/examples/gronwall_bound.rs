//! The energy estimate as a Gronwall envelope over a recorded run.

use chd_galerkin::diagnostics::{energy_gronwall_input, gronwall_envelope, norm_suite, Recorder};
use chd_galerkin::dynamics::run;
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.modes = 16;
    cfg.t_end = 0.2;
    let setup = cfg.build()?;
    let mut stepper = setup.stepper()?;
    let mut rec = Recorder::new(&setup.model, &setup.disc);
    run(&mut stepper, setup.initial_state()?, cfg.t_end, 5, &mut rec)?;

    let input = energy_gronwall_input(&setup.model, &setup.disc.basis, &rec.records, 1.0)?;
    let env = gronwall_envelope(&input)?;
    println!("holds: {}, smallest margin {:.3e}", env.holds, env.margin);
    let n = norm_suite(&rec.records)?;
    println!("{n:#?}");
    Ok(())
}
