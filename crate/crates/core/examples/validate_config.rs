//! Assumption audit for a JSON configuration.
//!
//! `cargo run --example validate_config [config.json]`

use chd_galerkin::io::{load_config, RunConfig};

fn main() -> chd_galerkin::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => load_config(p.as_ref(), false)?.0,
        None => RunConfig::default(),
    };
    let report = cfg.validate()?;
    println!("regime: {:?}", report.regime);
    for c in &report.checks {
        println!("[{}] {}: {}", if c.passed { "ok" } else { "!!" }, c.name, c.detail);
    }
    Ok(())
}
