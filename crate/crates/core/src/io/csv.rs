use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn header() -> String {
    DiagnosticsRecord::COLUMNS.join(",")
}

/// Streaming writer of diagnostics rows.
pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    /// Create `path` and write the header.
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = CsvWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        writeln!(w.out, "{}", header()).map_err(|e| Error::io(path, e))?;
        Ok(w)
    }

    /// Append to an existing file whose header matches.
    pub fn append(path: &Path) -> Result<Self> {
        let first = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?)
            .lines()
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?;
        if first.as_deref() != Some(header().as_str()) {
            return Err(Error::Corrupt {
                path: path.to_path_buf(),
                reason: "diagnostics header does not match".into(),
            });
        }
        let file = OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
        Ok(CsvWriter {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn write(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        let row: Vec<String> = r.to_row().into_iter().map(format_f64).collect();
        writeln!(self.out, "{}", row.join(",")).map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let mut w = CsvWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let corrupt = |reason: String| Error::Corrupt {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    if lines.next() != Some(header().as_str()) {
        return Err(corrupt("missing or unexpected header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| corrupt(format!("line {}: {e}", i + 2)))?;
            DiagnosticsRecord::from_row(&row).map_err(|e| corrupt(format!("line {}: {e}", i + 2)))
        })
        .collect()
}
