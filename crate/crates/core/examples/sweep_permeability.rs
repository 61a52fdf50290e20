//! Vanishing permeability: distance to the no-flow limit as `K -> 0`.
//!
//! `cargo run --release --example sweep_permeability [out_dir]`

use std::path::PathBuf;

use chd_galerkin::experiments::sweep_vanishing_permeability;
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let mut base = RunConfig::default();
    base.modes = 12;
    base.t_end = 0.1;
    let out = std::env::args().nth(1).map(PathBuf::from);
    let table = sweep_vanishing_permeability(&base, &[1.0, 0.25, 0.0625, 0.015625], out.as_deref())?;
    print!("{}", table.to_csv());
    println!("phi_diff decreasing: {}", table.strictly_decreasing(|r| r.phi_diff));
    Ok(())
}
