//! Interrupt a run, resume it from the checkpoint and compare with an
//! uninterrupted run.

use chd_galerkin::io::{resume_from_dir, run_to_dir, run_to_dir_until, RunConfig};

fn main() -> chd_galerkin::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.modes = 8;
    cfg.t_end = 0.05;
    cfg.output.checkpoint_every = 10;
    let setup = cfg.build()?;
    let dir = std::env::temp_dir().join(format!("chd-resume-{}", std::process::id()));
    let (a, b) = (dir.join("whole"), dir.join("split"));
    run_to_dir(&setup, &a)?;
    run_to_dir_until(&setup, &b, 20)?;
    resume_from_dir(&b, true)?;
    let read = |p: &std::path::Path| std::fs::read(p.join("diagnostics.csv")).expect("csv");
    println!("identical diagnostics: {}", read(&a) == read(&b));
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
