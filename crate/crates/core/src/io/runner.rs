use std::path::{Path, PathBuf};

use super::checkpoint::Checkpoint;
use super::config::{RunConfig, Setup};
use super::csv::CsvWriter;
use super::snapshot::write_field_snapshot;
use crate::diagnostics::{DiagnosticsRecord, Recorder};
use crate::dynamics::{Observer, SimState, Stepper};
use crate::error::{Error, Result};

pub const CONFIG_FILE: &str = "config.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

pub fn snapshot_path(out: &Path, step: u64) -> PathBuf {
    out.join(SNAPSHOT_DIR).join(format!("step_{step:08}.bin"))
}

/// Result of a run written to disk.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Records produced by this invocation (a resumed run starts after the checkpoint).
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: SimState,
    pub out_dir: PathBuf,
}

/// Run `setup` from its initial data, writing into `out`.
pub fn run_to_dir(setup: &Setup, out: &Path) -> Result<RunOutcome> {
    run_to_dir_until(setup, out, u64::MAX)
}

/// Like [`run_to_dir`] but stop after step `stop` (leaving a checkpoint there)
/// as if interrupted; [`resume_from_dir`] finishes the run.
pub fn run_to_dir_until(setup: &Setup, out: &Path, stop: u64) -> Result<RunOutcome> {
    std::fs::create_dir_all(out.join(SNAPSHOT_DIR)).map_err(|e| Error::io(out, e))?;
    let cfg_path = out.join(CONFIG_FILE);
    std::fs::write(&cfg_path, setup.config.to_json()).map_err(|e| Error::io(&cfg_path, e))?;
    let mut stepper = setup.stepper()?;
    let mut state = setup.initial_state()?;
    let mut csv = CsvWriter::create(&out.join(DIAGNOSTICS_FILE))?;
    let mut rec = Recorder::new(&setup.model, &setup.disc);
    let d = state.ensure_derived(&setup.model, &setup.disc)?;
    rec.observe(&state, &d)?;
    csv.write(rec.last().expect("just recorded"))?;
    write_field_snapshot(&state, &snapshot_path(out, 0))?;
    drive(setup, &mut stepper, state, rec, csv, out, stop)
}

/// Continue the run stored in `out` from its checkpoint. The stored config
/// must hash to the value recorded in the checkpoint.
pub fn resume_from_dir(out: &Path, strict: bool) -> Result<RunOutcome> {
    let cfg_path = out.join(CONFIG_FILE);
    let text = std::fs::read_to_string(&cfg_path).map_err(|e| Error::io(&cfg_path, e))?;
    let (mut config, _) = RunConfig::from_json(&text, strict)?;
    config.output.dir = Some(out.to_path_buf());
    let setup = config.build_unchecked()?;
    let ck = Checkpoint::read(&out.join(CHECKPOINT_FILE))?;
    if ck.config_hash != config.hash() {
        return Err(Error::Config(format!(
            "checkpoint belongs to config {}, found {}",
            ck.config_hash,
            config.hash()
        )));
    }
    let state = ck.state()?;
    if state.alpha.basis != setup.disc.basis {
        return Err(Error::DimensionMismatch("checkpoint basis differs from the config".into()));
    }
    let mut stepper = setup.stepper()?;
    stepper.set_energy_ref(ck.energy_ref());
    let rec = match ck.last_record()? {
        Some(last) => Recorder::resume(&setup.model, &setup.disc, last),
        None => Recorder::new(&setup.model, &setup.disc),
    };
    let csv = CsvWriter::append(&out.join(DIAGNOSTICS_FILE))?;
    drive(&setup, &mut stepper, state, rec, csv, out, u64::MAX)
}

fn drive(
    setup: &Setup,
    stepper: &mut Stepper,
    mut state: SimState,
    mut rec: Recorder,
    mut csv: CsvWriter,
    out: &Path,
    stop: u64,
) -> Result<RunOutcome> {
    let total = setup.total_steps()?;
    let end = total.min(stop);
    let o = &setup.config.output;
    let cadence = o.cadence.max(1);
    let hash = setup.config.hash();
    let ck_path = out.join(CHECKPOINT_FILE);
    let checkpoint = |s: &SimState, st: &Stepper, r: &Recorder| {
        Checkpoint::new(&hash, s, st.energy_ref(), r.last()).write(&ck_path)
    };
    while state.step < end {
        state = match stepper.step(&state) {
            Ok(s) => s,
            Err(e) => {
                csv.finish()?;
                checkpoint(&state, stepper, &rec)?;
                return Err(e);
            }
        };
        if state.step % cadence == 0 || state.step == total {
            let d = state.ensure_derived(&setup.model, &setup.disc)?;
            rec.observe(&state, &d)?;
            csv.write(rec.last().expect("just recorded"))?;
        }
        if o.snapshot_every > 0 && state.step % o.snapshot_every == 0 {
            write_field_snapshot(&state, &snapshot_path(out, state.step))?;
        }
        if o.checkpoint_every > 0 && state.step % o.checkpoint_every == 0 {
            checkpoint(&state, stepper, &rec)?;
        }
    }
    csv.finish()?;
    if state.step == total {
        write_field_snapshot(&state, &snapshot_path(out, state.step))?;
    }
    checkpoint(&state, stepper, &rec)?;
    Ok(RunOutcome {
        records: rec.into_records(),
        final_state: state,
        out_dir: out.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::csv::read_diagnostics_csv;
    use crate::io::snapshot::read_field_snapshot;
    use crate::spectral::Domain;

    fn small() -> RunConfig {
        let mut c = RunConfig {
            domain: Domain::Rectangle { lx: 1.0, ly: 1.0 },
            modes: 6,
            t_end: 0.02,
            ..Default::default()
        };
        c.output.cadence = 2;
        c
    }

    #[test]
    fn resumed_run_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let whole = dir.path().join("whole");
        let part = dir.path().join("part");
        let setup = small().build().unwrap();
        let full = run_to_dir(&setup, &whole).unwrap();
        let first = run_to_dir_until(&setup, &part, 9).unwrap();
        assert_eq!(first.final_state.step, 9);
        let resumed = resume_from_dir(&part, true).unwrap();
        assert_eq!(resumed.final_state, full.final_state);
        for f in [DIAGNOSTICS_FILE, CHECKPOINT_FILE] {
            assert_eq!(std::fs::read(whole.join(f)).unwrap(), std::fs::read(part.join(f)).unwrap(), "{f}");
        }
        let a = read_diagnostics_csv(&whole.join(DIAGNOSTICS_FILE)).unwrap();
        assert_eq!(a.len(), 11);
        let last = read_field_snapshot(&snapshot_path(&whole, 20)).unwrap();
        assert_eq!(last, full.final_state);
    }

    #[test]
    fn resume_rejects_changed_config() {
        let dir = tempfile::tempdir().unwrap();
        run_to_dir(&small().build().unwrap(), dir.path()).unwrap();
        let mut other = small();
        other.params.diffusivity = 2.0;
        std::fs::write(dir.path().join(CONFIG_FILE), other.to_json()).unwrap();
        assert!(matches!(resume_from_dir(dir.path(), true), Err(Error::Config(_))));
    }
}
