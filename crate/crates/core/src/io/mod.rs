//! Run configuration, on-disk formats and the file-backed run driver.

pub mod checkpoint;
pub mod config;
pub mod csv;
pub mod runner;
pub mod snapshot;

pub use checkpoint::Checkpoint;
pub use config::{load_config, parse_config, OutputConfig, RunConfig, Setup};
pub use csv::{read_diagnostics_csv, write_diagnostics_csv, CsvWriter};
pub use runner::{resume_from_dir, run_to_dir, run_to_dir_until, snapshot_path, RunOutcome};
pub use snapshot::{read_field_snapshot, read_field_snapshot_for, write_field_snapshot};
