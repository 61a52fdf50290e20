//! Manufactured-solution convergence in space and time.

use chd_galerkin::experiments::{manufactured_solution_study, reference_mms_model, Manufactured};
use chd_galerkin::spectral::Domain;

fn main() -> chd_galerkin::Result<()> {
    let model = reference_mms_model()?;
    let study = manufactured_solution_study(
        &model,
        Domain::interval(1.0)?,
        &Manufactured::decaying_cosines(),
        &[3, 4, 6, 8],
        &[1e-2, 5e-3, 2.5e-3, 1.25e-3],
        0.1,
    )?;
    for (k, e) in &study.spatial {
        println!("k = {k:2}: {e:.3e}");
    }
    for (dt, e) in &study.temporal {
        println!("dt = {dt:.2e}: {e:.3e}");
    }
    if let Some(f) = &study.time_fit {
        println!("time slope {:.3}", f.slope);
    }
    Ok(())
}
