//! The three rescaled pressures agree on the recovered `λ_v`.

use chd_galerkin::diagnostics::pressure_reformulations;
use chd_galerkin::io::RunConfig;

fn main() -> chd_galerkin::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.modes = 16;
    let setup = cfg.build()?;
    let state = setup.initial_state()?;
    let p = pressure_reformulations(&setup.model, &setup.disc, &state)?;
    let range = |v: &[f64]| v.iter().fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
    println!("q     in {:?}", range(&p.q));
    println!("p_hat in {:?}", range(&p.p_hat));
    println!("p_til in {:?}", range(&p.p_tilde));
    println!("lambda_v spread: {:.2e}", p.spread());
    Ok(())
}
