//! Vanishing chemotaxis: distance to the `χ = 0` system.

use chd_galerkin::experiments::{run_sweep, ComparisonNorm, SweepParameter, SweepSpec};
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let mut base = RunConfig::default();
    base.modes = 12;
    base.t_end = 0.1;
    let mut spec = SweepSpec::new(base, SweepParameter::Chemotaxis, vec![0.2, 0.1, 0.05, 0.025]);
    spec.norm = ComparisonNorm::L2H1;
    let table = run_sweep(&spec, None)?;
    print!("{}", table.to_csv());
    Ok(())
}
