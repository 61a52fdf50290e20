use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::dynamics::SimState;
use crate::error::{Error, Result};
use crate::spectral::{Domain, FieldCoeffs, SpectralBasis};

const FORMAT: &str = "chd-checkpoint 1";

/// Everything needed to continue a run bit-for-bit. Floats are stored as
/// their IEEE bit patterns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub config_hash: String,
    pub domain: Domain,
    pub modes: [usize; 2],
    pub step: u64,
    pub t_bits: u64,
    pub energy_ref_bits: Option<u64>,
    pub alpha_bits: Vec<u64>,
    pub gamma_bits: Vec<u64>,
    pub last_record_bits: Option<Vec<u64>>,
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn floats(v: &[u64]) -> Vec<f64> {
    v.iter().map(|&b| f64::from_bits(b)).collect()
}

impl Checkpoint {
    pub fn new(
        config_hash: &str,
        state: &SimState,
        energy_ref: Option<f64>,
        last_record: Option<&DiagnosticsRecord>,
    ) -> Self {
        let basis = &state.alpha.basis;
        Checkpoint {
            format: FORMAT.into(),
            config_hash: config_hash.into(),
            domain: *basis.domain(),
            modes: basis.modes(),
            step: state.step,
            t_bits: state.t.to_bits(),
            energy_ref_bits: energy_ref.map(f64::to_bits),
            alpha_bits: bits(&state.alpha.coeffs),
            gamma_bits: bits(&state.gamma.coeffs),
            last_record_bits: last_record.map(|r| bits(&r.to_row())),
        }
    }

    pub fn state(&self) -> Result<SimState> {
        let basis = SpectralBasis::with_modes(self.domain, self.modes)?;
        SimState::new(
            f64::from_bits(self.t_bits),
            self.step,
            FieldCoeffs::from_vec(&basis, floats(&self.alpha_bits))?,
            FieldCoeffs::from_vec(&basis, floats(&self.gamma_bits))?,
        )
    }

    pub fn energy_ref(&self) -> Option<f64> {
        self.energy_ref_bits.map(f64::from_bits)
    }

    pub fn last_record(&self) -> Result<Option<DiagnosticsRecord>> {
        self.last_record_bits
            .as_deref()
            .map(|b| DiagnosticsRecord::from_row(&floats(b)))
            .transpose()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        // Write then rename so an interrupted write never leaves a torn file.
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Corrupt {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        if c.format != FORMAT {
            return Err(Error::Corrupt {
                path: path.to_path_buf(),
                reason: format!("unknown format `{}`", c.format),
            });
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::project_initial_data;
    use crate::model::InitialProfile;
    use crate::spectral::Discretization;

    #[test]
    fn round_trip_is_bitwise() {
        let d = Discretization::new(Domain::interval(2.0).unwrap(), 7).unwrap();
        let mut s = project_initial_data(
            &InitialProfile::Planar {
                position: 0.7,
                width: 0.2,
            },
            &InitialProfile::Constant { value: 0.4 },
            &d,
            0,
        )
        .unwrap();
        s.t = 0.1 + 0.2;
        s.step = 3;
        let rec = DiagnosticsRecord {
            step: 3,
            t: s.t,
            energy_residual: f64::NAN,
            ..Default::default()
        };
        let c = Checkpoint::new("abc", &s, Some(1.0 / 3.0), Some(&rec));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        c.write(&p).unwrap();
        let back = Checkpoint::read(&p).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.state().unwrap(), s);
        assert_eq!(back.energy_ref(), Some(1.0 / 3.0));
        assert!(back.last_record().unwrap().unwrap().bitwise_eq(&rec));
        std::fs::write(&p, "{").unwrap();
        assert!(matches!(Checkpoint::read(&p), Err(Error::Corrupt { .. })));
    }
}
